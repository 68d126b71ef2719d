#pragma once

// Distance measures of product measures, truncated Mattila integrals,
// Riesz energy integrals, distance-set coverage proxies and the dimension
// thresholds for Cartesian products.

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prodist/fourier.hpp"
#include "prodist/measures.hpp"

namespace prodist {

using Rational = boost::rational<std::int64_t>;

// Exact parse of "3/10", "0.3", "1" or "-2.25".
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);
inline double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

// Default ceiling on the number of ordered atom pairs visited by the O(N^2)
// pair loops.
inline constexpr double kDefaultPairBudget = 2.0e8;

struct DistanceMeasure {
  double bin_width = 0.0;
  bool weighted = false;
  std::size_t coordinate = 1;  // axis of the |x_c - y_c| / |x - y| weight
  // (bin index, mass), bins are [k h, (k+1) h), only populated bins listed.
  std::vector<std::pair<std::int64_t, double>> bins;
  double total_mass = 0.0;
  // mu x mu mass of the diagonal x = y. Counted in bin 0 when unweighted,
  // given weight zero when weighted.
  double diagonal_mass = 0.0;
};

// Exhaustive loop over atom pairs. `coordinate` defaults to the last axis.
// Throws BudgetError when the pair count exceeds pair_budget.
DistanceMeasure distance_measure(const ProductMeasure& mu, double h, bool weighted,
                                 std::optional<std::size_t> coordinate = std::nullopt,
                                 double pair_budget = kDefaultPairBudget);

// Double sum of |x_c - y_c| / |x - y| over pairs x != y.
double weighted_mass(const ProductMeasure& mu, std::optional<std::size_t> coordinate = std::nullopt,
                     double pair_budget = kDefaultPairBudget);

struct MattilaSample {
  double t = 0.0;
  double sigma = 0.0;      // (weighted) spherical average at t
  double integrand = 0.0;  // sigma^2 t^(d-1)
  double partial = 0.0;    // integral from 1 to t
};

struct MattilaEstimate {
  double truncation = 1.0;
  double value = 0.0;
  bool weighted = false;
  std::vector<MattilaSample> samples;
  // Log-log slope of the integrand; below -1 indicates convergence.
  double integrand_slope = 0.0;
  // partial(2T') / partial(T') for T' = T/2^k, smallest T' first.
  std::vector<double> doubling_ratios;
};

// Integral over [1, T] of sigma(t)^2 t^(d-1) on a geometric grid anchored at T
// with `points_per_octave` samples per doubling; each cell is integrated as a
// power law through its endpoints, which is exact for power-law integrands.
MattilaEstimate mattila_truncated(const ProductMeasure& mu, double truncation, bool weighted,
                                  const QuadratureSpec& quadrature, int points_per_octave = 8,
                                  int workers = 1);

// Sum over pairs x != y of w_x w_y |x - y|^(-s); the diagonal is excluded.
double energy_integral(const GridMeasure& nu, double s);
double energy_integral(const ProductMeasure& mu, double s, double pair_budget = kDefaultPairBudget);

struct CoverageRow {
  double width = 0.0;
  std::size_t nonempty_bins = 0;
  double covered_length = 0.0;   // nonempty_bins * width
  double density_sq_norm = 0.0;  // sum (mass/width)^2 * width
};

// Re-bins at each width (each >= the native bin width).
std::vector<CoverageRow> coverage_report(const DistanceMeasure& dm, std::span<const double> widths);

struct DeltaDerivation {
  double gamma = 0.0;   // beta / 2
  double gamma0 = 0.0;  // maximizer of min(gamma0 (1 - alpha), gamma - gamma0 / 2)
  double delta = 0.0;   // gamma0 (1 - alpha)
};

// alpha in (0,1), beta > 0.
DeltaDerivation derive_delta(double alpha, double beta);

struct ThresholdInputs {
  std::vector<Rational> dims;  // s_j, one per coordinate, each in [0,1]
  std::optional<double> alpha;  // common dimension of regular factors; defaults to s_1 when all equal
  double c_nu = 1.0;
  double k = 1.0;
};

struct ThresholdReport {
  std::size_t dimension = 0;
  std::vector<Rational> dims;
  Rational total_dim;
  // d = 2: s_A + s_B + max(s_A, s_B) - 2
  std::optional<Rational> imbalance_margin;
  // d^2 / (2d - 1) and sum(s_j) minus it
  Rational product_threshold;
  Rational product_margin;
  // d = 2 with equal factor dimensions: derived candidate for the improvement
  // below 2/3 for regular factors.
  std::optional<double> regular_alpha;
  std::optional<double> regular_beta;
  std::optional<double> regular_gamma0;
  std::optional<double> regular_delta;
  std::optional<double> regular_margin;  // alpha - (2/3 - delta)
  double c_nu = 1.0;
  double k = 1.0;
  std::vector<std::string> applicable;

  // Flat key=value block.
  std::string to_text() const;
};

ThresholdReport threshold_report(const ThresholdInputs& inputs);

}  // namespace prodist
