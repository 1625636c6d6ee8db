#pragma once

#include <stdexcept>
#include <string>

namespace chemsim {

// Bad configuration text, bad profile parameters, violated model hypotheses.
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Integration failure: invariant breach (negative density, non-positive
// signal, non-finite values) or time-step collapse.
class solver_error : public std::runtime_error {
public:
  explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

// Snapshot (de)serialization failure.
class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chemsim
