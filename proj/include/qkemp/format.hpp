#pragma once

#include <string>

namespace qkemp {

/// Decimal rendering with 17 significant digits, enough to round-trip any
/// binary64 value.
std::string format_real(double value);

}  // namespace qkemp
