#pragma once

#include <span>
#include <string>
#include <vector>

namespace reloc {

/// Locale-independent shortest "%.12g"-style rendering; inf/nan spelled out.
std::string format_real(double x, int significant = 12);

/// Comma-joined list of format_real values.
std::string join_reals(std::span<const double> xs, char sep = ',');

/// Parses "a,b,c" into reals; throws Error(ParseError) on bad tokens.
std::vector<double> parse_real_list(const std::string& text);

}  // namespace reloc
