#pragma once

#include <span>
#include <string>

namespace compdist {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// "(a,b,c)" using format_double for each entry.
std::string format_tuple(std::span<const double> values);

}  // namespace compdist
