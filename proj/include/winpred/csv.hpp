#pragma once

#include <string>

namespace winpred {

// Shortest representation that round-trips a double exactly; used for every
// CSV cell so identical runs produce byte-identical files.
std::string fmt_double(double v);

std::string fmt_fixed(double v, int digits);

}  // namespace winpred
