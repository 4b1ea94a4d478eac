#pragma once

#include <string>

namespace sdelab {

/// Shortest round-trip decimal representation of x ("nan", "inf", "-inf"
/// for non-finite values).
std::string fmt_double(double x);

}  // namespace sdelab
