#pragma once

#include <span>
#include <string>
#include <string_view>

namespace hapstep {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict full-field parse; returns false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);

/// Trapezoidal integral of uniformly spaced samples.
double trapezoid(std::span<const double> values, double dt);

} // namespace hapstep
