#pragma once

#include <string>

namespace swe {

/// Shortest text holding 17 significant digits, so parsing it back returns
/// the same bits. Non-finite values print as nan, inf or -inf.
std::string format_double(double value);

/// Parses text written by format_double (or any decimal float). Throws
/// std::invalid_argument on trailing garbage or an empty string.
double parse_double(const std::string& text);

}  // namespace swe
