#include "prodist/fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "prodist/error.hpp"

namespace prodist {

LoglogFit loglog_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) {
    throw ValidationError("loglog_fit: need at least 3 points, got " +
                          std::to_string(points.size()));
  }
  const auto n = static_cast<double>(points.size());
  std::vector<double> lx;
  std::vector<double> ly;
  lx.reserve(points.size());
  ly.reserve(points.size());
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw ValidationError("loglog_fit: coordinates must be finite and strictly positive");
    }
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double spread = std::max(std::abs(mx), 1.0);
  if (sxx <= 1e-24 * spread * spread * n) {
    throw ValidationError("loglog_fit: degenerate x values (all equal)");
  }
  LoglogFit fit;
  fit.count = points.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sse += r * r;
  }
  fit.stderr_slope = n > 2.0 ? std::sqrt(std::max(0.0, sse / (n - 2.0)) / sxx) : 0.0;
  if (syy <= 0.0) {
    fit.r_squared = 1.0;
  } else {
    fit.r_squared = std::clamp(1.0 - sse / syy, 0.0, 1.0);
  }
  return fit;
}

}  // namespace prodist
