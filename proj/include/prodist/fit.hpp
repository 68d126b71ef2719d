#pragma once

#include <cstddef>
#include <span>
#include <utility>

namespace prodist {

// Ordinary least squares of log y against log x.
struct LoglogFit {
  double slope = 0.0;
  double intercept = 0.0;  // natural-log intercept
  double stderr_slope = 0.0;
  double r_squared = 0.0;
  std::size_t count = 0;
};

// Throws ValidationError on fewer than 3 points, nonpositive coordinates,
// or when all x values coincide.
LoglogFit loglog_fit(std::span<const std::pair<double, double>> points);

}  // namespace prodist
