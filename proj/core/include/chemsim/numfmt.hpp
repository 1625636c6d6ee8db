#pragma once

#include <string>

namespace chemsim {

// Round-trip-safe decimal rendering for text artifacts (%.17g).
std::string g17(double x);

}  // namespace chemsim
