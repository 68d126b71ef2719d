#include "prodist/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "prodist/energy.hpp"
#include "prodist/error.hpp"
#include "prodist/numeric.hpp"
#include "prodist/quadrature.hpp"

namespace prodist {

namespace {

double support_span(const GridMeasure& nu) {
  return static_cast<double>(nu.atoms().back().index - nu.atoms().front().index) * nu.resolution();
}

double support_diameter(const ProductMeasure& mu) {
  double sq = 0.0;
  for (const auto& f : mu.factors()) sq += support_span(f) * support_span(f);
  return std::sqrt(sq);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p *= 2;
  return p;
}

double weight_value(SphereWeight weight, std::span<const double> omega) {
  switch (weight) {
    case SphereWeight::none:
      return 1.0;
    case SphereWeight::sin_theta:
      return std::abs(omega.back());
    case SphereWeight::cos_theta:
      return std::abs(omega.front());
  }
  return 1.0;
}

double planar_average(const ProductMeasure& mu, double t, SphereWeight weight,
                      const QuadratureSpec& quadrature, std::size_t& nodes) {
  const GridMeasure& a = mu.factor(0);
  const GridMeasure& b = mu.factor(1);
  auto integrand = [&](double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double omega[2] = {c, s};
    return std::norm(measure_ft(a, t * c)) * std::norm(measure_ft(b, t * s)) *
           weight_value(weight, omega);
  };
  const double diameter = support_diameter(mu);
  if (weight == SphereWeight::none) {
    // Smooth and periodic: trapezoid is spectrally accurate once the
    // node count exceeds the angular bandwidth ~ 2 pi t diameter.
    const auto bandwidth = static_cast<std::size_t>(std::ceil(4.0 * kPi * t * diameter)) + 32;
    const auto res =
        periodic_trapezoid_doubling(integrand, std::max(quadrature.node_count, next_pow2(bandwidth)),
                                    quadrature.rel_tol);
    nodes = res.nodes;
    return res.value;
  }
  // The weights |sin|, |cos| have kinks at multiples of pi/2, so integrate the
  // four quarters separately where the integrand is smooth.
  const auto panels = static_cast<std::size_t>(std::ceil(0.5 * kPi * t * diameter)) + 4;
  const auto start = std::max(panels, quadrature.node_count / 64);
  double total = 0.0;
  nodes = 0;
  for (int q = 0; q < 4; ++q) {
    const auto res = gauss_doubling(integrand, 0.5 * kPi * q, 0.5 * kPi * (q + 1), start,
                                    quadrature.rel_tol);
    total += res.value;
    nodes += res.nodes;
  }
  return total;
}

}  // namespace

std::complex<double> measure_ft(const GridMeasure& nu, double xi) {
  const double step = xi / static_cast<double>(nu.grid_size());
  double re = 0.0;
  double im = 0.0;
  for (const Atom& a : nu.atoms()) {
    double p = static_cast<double>(a.index) * step;
    p -= std::floor(p);
    const double angle = 2.0 * kPi * p;
    re += a.weight * std::cos(angle);
    im -= a.weight * std::sin(angle);
  }
  return {re, im};
}

std::complex<double> product_ft(const ProductMeasure& mu, std::span<const double> xi) {
  if (xi.size() != mu.dimension()) {
    throw ValidationError("product_ft: frequency has " + std::to_string(xi.size()) +
                          " components, measure has dimension " + std::to_string(mu.dimension()));
  }
  std::complex<double> value{1.0, 0.0};
  for (std::size_t j = 0; j < xi.size(); ++j) value *= measure_ft(mu.factor(j), xi[j]);
  return value;
}

QuadratureSpec default_quadrature(std::size_t dimension, std::uint64_t seed) {
  QuadratureSpec spec;
  spec.seed = seed;
  if (dimension >= 3) {
    spec.kind = QuadratureKind::monte_carlo_sphere;
    spec.node_count = 4096;
  }
  return spec;
}

double validity_cap(const ProductMeasure& mu) { return 0.1 / mu.min_resolution(); }

double sphere_area(std::size_t dimension) {
  const auto d = static_cast<double>(dimension);
  return 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
}

SphericalAverage spherical_average(const ProductMeasure& mu, double t, SphereWeight weight,
                                   const QuadratureSpec& quadrature) {
  if (!(t >= 0.0)) throw ValidationError("spherical_average: t must be >= 0");
  const double cap = validity_cap(mu);
  if (t > cap * (1.0 + kTieTolerance)) {
    throw ValidationError("spherical_average: t = " + format_double(t) +
                          " exceeds the validity cap " + format_double(cap) +
                          " (0.1 / finest resolution)");
  }
  if (!(quadrature.rel_tol > 0.0)) throw ValidationError("quadrature: rel_tol must be positive");
  SphericalAverage out;
  out.t = t;
  const std::size_t d = mu.dimension();
  if (quadrature.kind == QuadratureKind::uniform_angle) {
    if (d != 2) {
      throw ValidationError("quadrature: uniform_angle requires d = 2; use monte_carlo_sphere");
    }
    out.value = planar_average(mu, t, weight, quadrature, out.nodes);
    return out;
  }

  if (quadrature.node_count < 2) throw ValidationError("quadrature: need at least 2 samples");
  // Directions depend only on the seed, so every t in a sweep sees the same
  // sample set regardless of evaluation order.
  std::mt19937_64 rng(stream_seed(quadrature.seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> omega(d);
  std::vector<double> xi(d);
  CompensatedSum sum;
  CompensatedSum sum_sq;
  for (std::size_t k = 0; k < quadrature.node_count; ++k) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& c : omega) {
        c = normal(rng);
        norm += c * c;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < d; ++j) {
      omega[j] /= norm;
      xi[j] = t * omega[j];
    }
    const double f = std::norm(product_ft(mu, xi)) * weight_value(weight, omega);
    sum.add(f);
    sum_sq.add(f * f);
  }
  const auto n = static_cast<double>(quadrature.node_count);
  const double mean = sum.value() / n;
  const double var = std::max(0.0, (sum_sq.value() - n * mean * mean) / (n - 1.0));
  const double area = sphere_area(d);
  out.value = area * mean;
  out.stderr_value = area * std::sqrt(var / n);
  out.nodes = quadrature.node_count;
  return out;
}

SphericalAverageSeries spherical_average_series(const ProductMeasure& mu,
                                                std::span<const double> t_values,
                                                SphereWeight weight,
                                                const QuadratureSpec& quadrature, int workers) {
  SphericalAverageSeries series;
  series.weight = weight;
  series.quadrature = quadrature;
  series.points = parallel_map(t_values.size(), workers, [&](std::size_t i) {
    return spherical_average(mu, t_values[i], weight, quadrature);
  });
  if (series.points.size() >= 3) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : series.points) pts.emplace_back(p.t, p.value);
    const LoglogFit fit = loglog_fit(pts);
    series.fitted_decay = fit.slope;
    series.stderr_decay = fit.stderr_slope;
  }
  return series;
}

SolidAverage solid_average(const GridMeasure& nu, double t, double a, double b, double rel_tol) {
  if (!(t >= 1.0)) throw ValidationError("solid_average: t must be >= 1");
  if (!(a < b)) throw ValidationError("solid_average: empty interval [a, b]");
  const auto panels =
      static_cast<std::size_t>(std::ceil(t * support_span(nu) * (b - a))) + 4;
  const auto res = gauss_doubling(
      [&](double u) { return std::norm(measure_ft(nu, t * u)); }, a, b, panels, rel_tol);
  return {res.value, res.nodes};
}

std::complex<double> weighted_circle_integral(std::array<double, 2> gap, double t, double rel_tol) {
  const double rho = t * std::hypot(gap[0], gap[1]);
  const auto panels = static_cast<std::size_t>(std::ceil(kPi * rho)) + 4;
  auto upper = [&](double theta) {
    const double phase = 2.0 * kPi * t * (gap[0] * std::cos(theta) + gap[1] * std::sin(theta));
    return std::polar(std::sin(theta), phase);
  };
  auto lower = [&](double theta) {
    const double phase = 2.0 * kPi * t * (gap[0] * std::cos(theta) + gap[1] * std::sin(theta));
    return std::polar(-std::sin(theta), phase);
  };
  // Near-cancelling cases (axis gaps) are tiny, so relative accuracy alone
  // can sit below rounding; accept an absolute floor far below the residuals
  // the stationary-phase fit resolves.
  constexpr double kAbsFloor = 1e-12;
  const auto top =
      gauss_doubling(upper, 0.0, kPi, panels, rel_tol, std::size_t{1} << 22, kAbsFloor);
  const auto bottom =
      gauss_doubling(lower, kPi, 2.0 * kPi, panels, rel_tol, std::size_t{1} << 22, kAbsFloor);
  return top.value + bottom.value;
}

StationaryPhaseReport stationary_phase_check(std::array<double, 2> gap,
                                             std::span<const double> t_values) {
  const double len = std::hypot(gap[0], gap[1]);
  if (!(len > 0.0)) throw ValidationError("stationary_phase_check: gap must be nonzero");
  const double sin_gap = std::abs(gap[1]) / len;
  auto main_term = [&](double t) {
    const double rho = t * len;
    return 2.0 / std::sqrt(rho) * std::cos(2.0 * kPi * (rho - 0.125)) * sin_gap;
  };

  StationaryPhaseReport report;
  report.gap = gap;
  std::vector<std::pair<double, double>> fit_points;
  for (double t : t_values) {
    if (!(t > 0.0)) throw ValidationError("stationary_phase_check: t values must be positive");
    StationaryPhaseRow row;
    row.t = t;
    row.exact = weighted_circle_integral(gap, t);
    row.main = main_term(t);
    row.main_envelope = 2.0 / std::sqrt(t * len) * sin_gap;
    double sq = std::norm(row.exact - row.main);
    for (int k = 1; k < kPhaseOffsets; ++k) {
      const double tk = t + static_cast<double>(k) / (kPhaseOffsets * len);
      sq += std::norm(weighted_circle_integral(gap, tk) - main_term(tk));
    }
    row.resid = std::sqrt(sq / kPhaseOffsets);
    if (t * len >= 10.0 && row.resid > 0.0) fit_points.emplace_back(t, row.resid);
    report.rows.push_back(row);
  }
  if (fit_points.size() < 3) {
    throw ValidationError(
        "stationary_phase_check: need at least 3 values with t|gap| >= 10 for the fit");
  }
  const LoglogFit fit = loglog_fit(fit_points);
  report.residual_slope = fit.slope;
  report.residual_slope_stderr = fit.stderr_slope;
  report.fit_points = fit_points.size();
  return report;
}

AngularDecomposition angular_decomposition(const ProductMeasure& mu, double t, double gamma0,
                                           const CutoffFunction& cutoff) {
  if (mu.dimension() != 2) throw ValidationError("angular_decomposition: requires d = 2");
  if (!(gamma0 > 0.0 && gamma0 < 0.5)) {
    throw ValidationError("angular_decomposition: gamma0 must lie in (0, 1/2)");
  }
  if (!(t >= 1.0)) throw ValidationError("angular_decomposition: t must be >= 1");
  cutoff.validate();
  if (!(cutoff.scale > 1.0)) {
    throw ValidationError("angular_decomposition: cutoff scale must exceed 1");
  }
  const GridMeasure& a = mu.factor(0);
  const GridMeasure& b = mu.factor(1);
  auto integrand = [&](double theta) {
    return std::norm(measure_ft(a, t * std::cos(theta))) *
           std::norm(measure_ft(b, t * std::sin(theta)));
  };
  const double rate = t * (support_span(a) + support_span(b));
  auto integrate = [&](double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    const auto panels = static_cast<std::size_t>(std::ceil(rate * (hi - lo))) + 4;
    return gauss_doubling(integrand, lo, hi, panels, 1e-10).value;
  };

  AngularDecomposition out;
  out.t = t;
  out.gamma0 = gamma0;
  out.theta_cut = std::pow(t, -gamma0);
  const double half_pi = 0.5 * kPi;
  const double cut = std::min(out.theta_cut, half_pi);
  out.near_zero = integrate(0.0, cut);
  out.near_half_pi = integrate(half_pi - cut, half_pi);
  out.middle = out.theta_cut < 0.25 * kPi ? integrate(out.theta_cut, half_pi - out.theta_cut) : 0.0;

  out.energy_a = smoothed_energy_space(sumset_autocorrelation(a), t, cutoff);
  out.energy_b = smoothed_energy_space(sumset_autocorrelation(b), t, cutoff);
  const double s = cutoff.scale;
  out.cs_constant = 0.5 * kPi * s * s / (s - 1.0);
  out.cs_bound = out.cs_constant * std::pow(t, gamma0) * std::sqrt(out.energy_a * out.energy_b);
  return out;
}

}  // namespace prodist
