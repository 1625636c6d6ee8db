#include "chemsim/numfmt.hpp"

#include <cstdio>

namespace chemsim {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace chemsim
