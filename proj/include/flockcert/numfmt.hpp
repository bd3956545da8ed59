#pragma once

#include <string>
#include <string_view>

namespace flockcert {

/// `%.17g`-style rendering; infinities print as `inf`/`-inf`, NaN as `nan`.
std::string format_double(double value);

/// Shortest representation that parses back to the same double.
std::string format_shortest(double value);

/// Strict parse of a full token (accepts `inf`, `-inf`, `nan`). Throws
/// ParseError when the token is not entirely a number.
double parse_double(std::string_view token);

}  // namespace flockcert
