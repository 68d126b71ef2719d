#include "prodist/energy.hpp"

#include <algorithm>
#include <cmath>

#include "prodist/error.hpp"
#include "prodist/fourier.hpp"
#include "prodist/numeric.hpp"
#include "prodist/quadrature.hpp"

namespace prodist {

namespace {

constexpr std::int64_t kMaxDenseSumGrid = std::int64_t{1} << 26;
constexpr double kMaxSumPairs = 1.2e9;
// Ordered pairs of sumset entries visited by the smoothed space side.
constexpr double kMaxSmoothedPairs = 4.0e9;

// Largest integer gap g with g * delta strictly below r (grid ties excluded).
std::int64_t strict_window_in_cells(std::int64_t grid_size, double r) {
  const double cells = r * static_cast<double>(grid_size) * (1.0 - kTieTolerance);
  if (cells > 4.0 * static_cast<double>(grid_size)) return 4 * grid_size;
  return static_cast<std::int64_t>(std::ceil(cells)) - 1;
}

double bruteforce_energy(const GridMeasure& nu, double r) {
  const std::size_t n = nu.size();
  if (n > kBruteforceAtomLimit) {
    throw BudgetError("additive_energy: bruteforce limited to " +
                      std::to_string(kBruteforceAtomLimit) + " atoms, measure has " +
                      std::to_string(n));
  }
  // All ordered pairs (u1, u2) with their sum and product weight; every
  // quadruple is then a pair of pairs.
  std::vector<double> sums;
  std::vector<double> weights;
  sums.reserve(n * n);
  weights.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      sums.push_back(nu.position(i) + nu.position(j));
      weights.push_back(nu.atoms()[i].weight * nu.atoms()[j].weight);
    }
  }
  const double threshold = r * (1.0 - kTieTolerance);
  CompensatedSum total;
  for (std::size_t p = 0; p < sums.size(); ++p) {
    const double s = sums[p];
    double row = 0.0;
    for (std::size_t q = 0; q < sums.size(); ++q) {
      row += std::abs(s - sums[q]) < threshold ? weights[q] : 0.0;
    }
    total.add(weights[p] * row);
  }
  return total.value();
}

void check_radius(double r) {
  if (!(r > 0.0) || std::isnan(r)) {
    throw ValidationError("additive_energy: r must be positive, got " + format_double(r));
  }
}

}  // namespace

double SumsetDistribution::diameter() const {
  if (entries.empty()) return 0.0;
  return static_cast<double>(entries.back().index - entries.front().index) * resolution();
}

double SumsetDistribution::total_mass() const {
  CompensatedSum acc;
  for (const Atom& a : entries) acc.add(a.weight);
  return acc.value();
}

SumsetDistribution sumset_autocorrelation(const GridMeasure& nu) {
  const auto n = static_cast<double>(nu.size());
  if (n * n > kMaxSumPairs) {
    throw BudgetError("sumset_autocorrelation: " + std::to_string(nu.size()) +
                      " atoms exceed the pair budget");
  }
  const std::int64_t lo = nu.atoms().front().index;
  const std::int64_t hi = nu.atoms().back().index;
  const std::int64_t span = 2 * (hi - lo) + 1;
  if (span > kMaxDenseSumGrid) {
    throw BudgetError("sumset_autocorrelation: sum grid of " + std::to_string(span) +
                      " cells exceeds the dense budget");
  }
  // Fixed left-to-right accumulation, offset so the buffer starts at 2*lo.
  std::vector<double> dense(static_cast<std::size_t>(span), 0.0);
  for (const Atom& a : nu.atoms()) {
    for (const Atom& b : nu.atoms()) {
      dense[static_cast<std::size_t>(a.index + b.index - 2 * lo)] += a.weight * b.weight;
    }
  }
  SumsetDistribution q;
  q.base = nu.base();
  q.level = nu.level();
  q.grid_size = nu.grid_size();
  for (std::int64_t k = 0; k < span; ++k) {
    const double w = dense[static_cast<std::size_t>(k)];
    if (w > 0.0) q.entries.push_back({k + 2 * lo, w});
  }
  return q;
}

double additive_energy(const SumsetDistribution& q, double r) {
  check_radius(r);
  const std::int64_t window = strict_window_in_cells(q.grid_size, r);
  const auto& e = q.entries;
  std::vector<double> prefix(e.size() + 1, 0.0);
  CompensatedSum run;
  for (std::size_t i = 0; i < e.size(); ++i) {
    run.add(e[i].weight);
    prefix[i + 1] = run.value();
  }
  // Sliding window [lo, hi) of entries with |index - e[a].index| <= window.
  CompensatedSum total;
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t a = 0; a < e.size(); ++a) {
    while (e[lo].index < e[a].index - window) ++lo;
    while (hi < e.size() && e[hi].index <= e[a].index + window) ++hi;
    total.add(e[a].weight * (prefix[hi] - prefix[lo]));
  }
  return total.value();
}

double additive_energy(const GridMeasure& nu, double r, EnergyAlgorithm algorithm) {
  check_radius(r);
  switch (algorithm) {
    case EnergyAlgorithm::bruteforce:
      return bruteforce_energy(nu, r);
    case EnergyAlgorithm::autocorrelation:
      return additive_energy(sumset_autocorrelation(nu), r);
  }
  throw ValidationError("additive_energy: unknown algorithm");
}

EnergyProfile energy_profile(const GridMeasure& nu, std::span<const double> r_values, double alpha,
                             int workers) {
  if (r_values.size() < 3) {
    throw ValidationError("energy_profile: need at least 3 scales, got " +
                          std::to_string(r_values.size()));
  }
  const double delta = nu.resolution();
  for (double r : r_values) {
    if (!(r >= delta * (1.0 - kTieTolerance))) {
      throw ValidationError("energy_profile: r = " + format_double(r) +
                            " is below the grid resolution " + format_double(delta));
    }
  }
  const SumsetDistribution q = sumset_autocorrelation(nu);
  const auto energies = parallel_map(r_values.size(), workers,
                                     [&](std::size_t i) { return additive_energy(q, r_values[i]); });
  EnergyProfile profile;
  profile.alpha_ref = alpha;
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    profile.samples.push_back({r_values[i], energies[i]});
    points.emplace_back(r_values[i], energies[i]);
  }
  const LoglogFit fit = loglog_fit(points);
  profile.fitted_exponent = fit.slope;
  profile.stderr_exponent = fit.stderr_slope;
  return profile;
}

std::vector<double> default_energy_scales(const GridMeasure& nu) {
  const double diameter = 2.0 * static_cast<double>(nu.atoms().back().index - nu.atoms().front().index) *
                          nu.resolution();
  std::vector<double> scales;
  for (double r = 4.0 * nu.resolution(); r <= diameter * (1.0 + kTieTolerance); r *= 2.0) {
    scales.push_back(r);
  }
  return scales;
}

double smoothed_energy_space(const SumsetDistribution& q, double t, const CutoffFunction& cutoff) {
  cutoff.validate();
  const auto& e = q.entries;
  const auto m = static_cast<double>(e.size());
  if (m * m > kMaxSmoothedPairs) {
    throw BudgetError("smoothed_energy: " + std::to_string(e.size()) +
                      " sumset entries exceed the pair budget");
  }
  const std::int64_t max_gap = e.back().index - e.front().index;
  std::vector<double> kernel(static_cast<std::size_t>(max_gap) + 1);
  for (std::int64_t g = 0; g <= max_gap; ++g) {
    kernel[static_cast<std::size_t>(g)] = cutoff(t * static_cast<double>(g) * q.resolution());
  }
  // psi is even, so sum q(a) q(b) psi(t (a-b) delta) over ordered pairs
  // = diagonal + 2 * (a < b).
  CompensatedSum total;
  for (std::size_t a = 0; a < e.size(); ++a) {
    double row = 0.0;
    for (std::size_t b = a + 1; b < e.size(); ++b) {
      row += e[b].weight * kernel[static_cast<std::size_t>(e[b].index - e[a].index)];
    }
    total.add(e[a].weight * (e[a].weight * kernel[0] + 2.0 * row));
  }
  return total.value();
}

SmoothedEnergy smoothed_energy(const GridMeasure& nu, double t, const CutoffFunction& cutoff) {
  cutoff.validate();
  if (!(t >= 1.0)) throw ValidationError("smoothed_energy: t must be >= 1");
  SmoothedEnergy out;
  out.space_side = smoothed_energy_space(sumset_autocorrelation(nu), t, cutoff);

  // |nu^|^4 is even, so integrate over [0, s] and double.
  const double s = cutoff.transform_support();
  const double span = static_cast<double>(nu.atoms().back().index - nu.atoms().front().index) *
                      nu.resolution();
  const auto panels = static_cast<std::size_t>(std::ceil(2.0 * t * span * s)) + 4;
  auto integrand = [&](double u) {
    const double a = std::norm(measure_ft(nu, t * u));
    return a * a * cutoff.transform(u);
  };
  const auto quad = gauss_doubling(integrand, 0.0, s, panels, 1e-11);
  out.fourier_side = 2.0 * quad.value;
  out.quadrature_nodes = 2 * quad.nodes;
  return out;
}

DZParams dz_beta(double alpha, double c_nu, double k) {
  if (!(alpha > 0.0)) throw ValidationError("dz_beta: alpha must be > 0");
  if (!(alpha < 1.0)) throw ValidationError("dz_beta: alpha must be < 1 (formula singular at 1)");
  if (!(c_nu >= 1.0)) throw ValidationError("dz_beta: C_nu must be >= 1");
  if (!(k > 0.0)) throw ValidationError("dz_beta: K must be > 0");
  DZParams p;
  p.alpha = alpha;
  p.c_nu = c_nu;
  p.k = k;
  const double inner = k * std::sqrt(1.0 + std::log(c_nu)) / std::sqrt(1.0 - alpha);
  p.beta = alpha * std::exp(-std::exp(inner));
  return p;
}

}  // namespace prodist
