#pragma once

#include <string>
#include <string_view>

namespace slgfm {

/// Shortest decimal representation that parses back to exactly the same
/// double (std::to_chars round-trip guarantee); infinities and NaN render as
/// "inf"/"-inf"/"nan".  Keeps CSV output byte-stable across runs.
std::string format_double(double x);

/// Strict full-string parse of a decimal double.  Throws
/// std::invalid_argument when the text is not a complete number.
double parse_double(std::string_view text);

}  // namespace slgfm
