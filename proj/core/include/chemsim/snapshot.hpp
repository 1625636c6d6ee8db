#pragma once

#include <string>

#include "chemsim/grid.hpp"
#include "chemsim/model.hpp"

namespace chemsim {

// Binary snapshot format, explicitly little-endian regardless of host:
//   offset 0   magic   4 bytes "CHSN"
//   offset 4   version u32 (currently 1)
//   offset 8   dim     u32 (1 or 2)
//   offset 12  n[0]    u32   (and n[1] u32 at offset 16 when dim == 2)
//   then       time    f64
//   then       u       cells() f64, row-major (x fastest)
//   then       v       cells() f64, same layout
// No padding, no trailing bytes. Doubles round-trip bitwise.

// Serializes s (sized for g) to path. Throws io_error on filesystem failure
// and std::invalid_argument if the field sizes do not match the grid.
void write_snapshot(const std::string& path, const State& s, const Grid& g);

// Reads a snapshot written for exactly this grid. Throws io_error citing the
// byte offset of the first inconsistency (bad magic, unsupported version,
// mismatched dim or cell counts, truncation, trailing bytes).
State read_snapshot(const std::string& path, const Grid& g);

}  // namespace chemsim
