#include "prodist/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "prodist/energy.hpp"
#include "prodist/error.hpp"
#include "prodist/numeric.hpp"

namespace prodist {

namespace {

// Flattened atoms of a product measure: coordinates row-major, d per atom.
struct PointCloud {
  std::size_t dimension = 0;
  std::vector<double> coords;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  const double* point(std::size_t i) const { return coords.data() + i * dimension; }
};

PointCloud flatten(const ProductMeasure& mu, double pair_budget) {
  const auto n = static_cast<double>(mu.atom_count());
  if (n * n > pair_budget) {
    throw BudgetError("pair loop over " + std::to_string(mu.atom_count()) +
                      " atoms exceeds the pair budget of " + format_double(pair_budget) +
                      "; coarsen the factor levels");
  }
  PointCloud cloud;
  cloud.dimension = mu.dimension();
  const std::size_t count = mu.atom_count();
  cloud.coords.resize(count * cloud.dimension);
  cloud.weights.resize(count);
  std::vector<std::size_t> digit(cloud.dimension, 0);
  for (std::size_t k = 0; k < count; ++k) {
    double w = 1.0;
    for (std::size_t j = 0; j < cloud.dimension; ++j) {
      cloud.coords[k * cloud.dimension + j] = mu.factor(j).position(digit[j]);
      w *= mu.factor(j).atoms()[digit[j]].weight;
    }
    cloud.weights[k] = w;
    for (std::size_t j = cloud.dimension; j-- > 0;) {
      if (++digit[j] < mu.factor(j).size()) break;
      digit[j] = 0;
    }
  }
  return cloud;
}

double distance(const PointCloud& c, std::size_t i, std::size_t j) {
  const double* x = c.point(i);
  const double* y = c.point(j);
  double sq = 0.0;
  for (std::size_t k = 0; k < c.dimension; ++k) sq += (x[k] - y[k]) * (x[k] - y[k]);
  return std::sqrt(sq);
}

std::size_t resolve_coordinate(const ProductMeasure& mu, std::optional<std::size_t> coordinate) {
  const std::size_t c = coordinate.value_or(mu.dimension() - 1);
  if (c >= mu.dimension()) throw ValidationError("coordinate: outside the product dimension");
  return c;
}

// Integral of a power law through (t0, g0), (t1, g1) over [t0, t1].
double power_law_cell(double t0, double g0, double t1, double g1) {
  if (!(g0 > 0.0) || !(g1 > 0.0)) return 0.5 * (g0 + g1) * (t1 - t0);
  const double span = std::log(t1 / t0);
  const double p1 = std::log(g1 / g0) / span + 1.0;
  if (std::abs(p1 * span) < 1e-12) return g0 * t0 * span;
  return g0 * t0 * std::expm1(p1 * span) / p1;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  auto fail = [&] { return ValidationError("cannot parse rational from '" + text + "'"); };
  if (text.empty()) throw fail();
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      std::size_t p1 = 0;
      std::size_t p2 = 0;
      const long long num = std::stoll(text.substr(0, slash), &p1);
      const long long den = std::stoll(text.substr(slash + 1), &p2);
      if (p1 != slash || p2 != text.size() - slash - 1 || den == 0) throw fail();
      return Rational(num, den);
    }
    std::string digits = text;
    bool negative = false;
    if (digits.front() == '-' || digits.front() == '+') {
      negative = digits.front() == '-';
      digits.erase(0, 1);
    }
    const auto dot = digits.find('.');
    std::string whole = digits.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : digits.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw fail();
    if (frac.size() > 15) throw fail();
    for (char ch : whole + frac) {
      if (ch < '0' || ch > '9') throw fail();
    }
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::int64_t num = std::stoll(whole.empty() ? "0" : whole) * den +
                             (frac.empty() ? 0 : std::stoll(frac));
    return Rational(negative ? -num : num, den);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw fail();
  }
}

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

DistanceMeasure distance_measure(const ProductMeasure& mu, double h, bool weighted,
                                 std::optional<std::size_t> coordinate, double pair_budget) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("distance_measure: h must be positive");
  const std::size_t axis = resolve_coordinate(mu, coordinate);
  const PointCloud cloud = flatten(mu, pair_budget);
  const double max_dist = std::sqrt(static_cast<double>(mu.dimension()));
  const double bin_count = std::floor(max_dist / h) + 2.0;
  if (bin_count > 5e7) throw BudgetError("distance_measure: bin width too small (too many bins)");

  std::vector<double> bins(static_cast<std::size_t>(bin_count), 0.0);
  DistanceMeasure dm;
  dm.bin_width = h;
  dm.weighted = weighted;
  dm.coordinate = axis;
  CompensatedSum diagonal;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double wi = cloud.weights[i];
    diagonal.add(wi * wi);
    if (!weighted) bins[0] += wi * wi;
    for (std::size_t j = i + 1; j < cloud.size(); ++j) {
      const double d = distance(cloud, i, j);
      double mass = 2.0 * wi * cloud.weights[j];
      if (weighted) mass *= std::abs(cloud.point(i)[axis] - cloud.point(j)[axis]) / d;
      const auto bin = static_cast<std::size_t>(std::floor(d / h * (1.0 + kTieTolerance)));
      bins[bin] += mass;
    }
  }
  dm.diagonal_mass = diagonal.value();
  CompensatedSum total;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (bins[k] > 0.0) {
      dm.bins.emplace_back(static_cast<std::int64_t>(k), bins[k]);
      total.add(bins[k]);
    }
  }
  dm.total_mass = total.value();
  return dm;
}

double weighted_mass(const ProductMeasure& mu, std::optional<std::size_t> coordinate,
                     double pair_budget) {
  const std::size_t axis = resolve_coordinate(mu, coordinate);
  const PointCloud cloud = flatten(mu, pair_budget);
  CompensatedSum total;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = i + 1; j < cloud.size(); ++j) {
      row += cloud.weights[j] * std::abs(cloud.point(i)[axis] - cloud.point(j)[axis]) /
             distance(cloud, i, j);
    }
    total.add(2.0 * cloud.weights[i] * row);
  }
  return total.value();
}

MattilaEstimate mattila_truncated(const ProductMeasure& mu, double truncation, bool weighted,
                                  const QuadratureSpec& quadrature, int points_per_octave,
                                  int workers) {
  const double cap = validity_cap(mu);
  if (!(truncation >= 1.0)) throw ValidationError("mattila_truncated: T must be >= 1");
  if (truncation > cap * (1.0 + kTieTolerance)) {
    throw ValidationError("mattila_truncated: T = " + format_double(truncation) +
                          " exceeds the validity cap " + format_double(cap));
  }
  if (points_per_octave < 1) throw ValidationError("mattila_truncated: points_per_octave must be >= 1");

  // Grid anchored at T so that every T / 2^k is a sample.
  std::vector<double> ts;
  for (int j = 0;; ++j) {
    const double t = truncation * std::exp2(-static_cast<double>(j) / points_per_octave);
    if (t <= 1.0 * (1.0 + 1e-12)) break;
    ts.push_back(t);
  }
  ts.push_back(1.0);
  std::reverse(ts.begin(), ts.end());

  const SphereWeight weight = weighted ? SphereWeight::sin_theta : SphereWeight::none;
  const auto sigmas = parallel_map(ts.size(), workers, [&](std::size_t i) {
    return spherical_average(mu, ts[i], weight, quadrature).value;
  });
  const double power = static_cast<double>(mu.dimension()) - 1.0;

  MattilaEstimate est;
  est.truncation = truncation;
  est.weighted = weighted;
  double partial = 0.0;
  std::vector<std::pair<double, double>> fit_points;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    MattilaSample s;
    s.t = ts[i];
    s.sigma = sigmas[i];
    s.integrand = s.sigma * s.sigma * std::pow(s.t, power);
    if (i > 0) {
      const auto& prev = est.samples.back();
      partial += power_law_cell(prev.t, prev.integrand, s.t, s.integrand);
    }
    s.partial = partial;
    if (s.integrand > 0.0) fit_points.emplace_back(s.t, s.integrand);
    est.samples.push_back(s);
  }
  est.value = partial;
  if (fit_points.size() >= 3) est.integrand_slope = loglog_fit(fit_points).slope;

  // Samples at T/2^k sit at index size-1-k*points_per_octave.
  const auto step = static_cast<std::size_t>(points_per_octave);
  for (std::size_t hi = est.samples.size() - 1; hi >= step; hi -= step) {
    const std::size_t lo = hi - step;
    if (est.samples[lo].partial > 0.0) {
      est.doubling_ratios.push_back(est.samples[hi].partial / est.samples[lo].partial);
    }
  }
  std::reverse(est.doubling_ratios.begin(), est.doubling_ratios.end());
  return est;
}

double energy_integral(const GridMeasure& nu, double s) {
  if (!(s >= 0.0)) throw ValidationError("energy_integral: s must be >= 0");
  CompensatedSum total;
  const auto atoms = nu.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      const double d = static_cast<double>(atoms[j].index - atoms[i].index) * nu.resolution();
      row += atoms[j].weight * std::pow(d, -s);
    }
    total.add(2.0 * atoms[i].weight * row);
  }
  return total.value();
}

double energy_integral(const ProductMeasure& mu, double s, double pair_budget) {
  if (!(s >= 0.0)) throw ValidationError("energy_integral: s must be >= 0");
  const PointCloud cloud = flatten(mu, pair_budget);
  CompensatedSum total;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = i + 1; j < cloud.size(); ++j) {
      row += cloud.weights[j] * std::pow(distance(cloud, i, j), -s);
    }
    total.add(2.0 * cloud.weights[i] * row);
  }
  return total.value();
}

std::vector<CoverageRow> coverage_report(const DistanceMeasure& dm, std::span<const double> widths) {
  std::vector<CoverageRow> rows;
  for (double w : widths) {
    if (!(w >= dm.bin_width * (1.0 - kTieTolerance))) {
      throw ValidationError("coverage_report: width " + format_double(w) +
                            " is below the native bin width " + format_double(dm.bin_width));
    }
    std::map<std::int64_t, double> coarse;
    for (const auto& [k, mass] : dm.bins) {
      const double left = static_cast<double>(k) * dm.bin_width;
      coarse[static_cast<std::int64_t>(std::floor(left / w * (1.0 + kTieTolerance)))] += mass;
    }
    CoverageRow row;
    row.width = w;
    for (const auto& [k, mass] : coarse) {
      if (mass > 0.0) {
        ++row.nonempty_bins;
        row.density_sq_norm += (mass / w) * (mass / w) * w;
      }
    }
    row.covered_length = static_cast<double>(row.nonempty_bins) * w;
    rows.push_back(row);
  }
  return rows;
}

DeltaDerivation derive_delta(double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("derive_delta: alpha must lie in (0,1)");
  if (!(beta > 0.0)) throw ValidationError("derive_delta: beta must be > 0");
  DeltaDerivation out;
  out.gamma = 0.5 * beta;
  // gamma0 (1 - alpha) increases and gamma - gamma0/2 decreases in gamma0, so
  // the minimum is maximized where they cross.
  out.gamma0 = out.gamma / (1.0 - alpha + 0.5);
  out.delta = out.gamma0 * (1.0 - alpha);
  return out;
}

ThresholdReport threshold_report(const ThresholdInputs& in) {
  if (in.dims.size() < 2) throw ValidationError("dims: need at least 2 coordinates");
  for (const Rational& s : in.dims) {
    if (s < Rational(0) || s > Rational(1)) throw ValidationError("dims: every s_j must lie in [0,1]");
  }
  ThresholdReport rep;
  rep.dimension = in.dims.size();
  rep.dims = in.dims;
  rep.c_nu = in.c_nu;
  rep.k = in.k;
  rep.total_dim = Rational(0);
  for (const Rational& s : in.dims) rep.total_dim += s;

  const auto d = static_cast<std::int64_t>(rep.dimension);
  rep.product_threshold = Rational(d * d, 2 * d - 1);
  rep.product_margin = rep.total_dim - rep.product_threshold;

  if (rep.dimension == 2) {
    const Rational sa = in.dims[0];
    const Rational sb = in.dims[1];
    rep.imbalance_margin = sa + sb + std::max(sa, sb) - Rational(2);
    if (*rep.imbalance_margin > Rational(0)) rep.applicable.push_back("product-imbalance");

    std::optional<double> alpha = in.alpha;
    if (!alpha && sa == sb) alpha = to_double(sa);
    if (alpha && sa == sb && *alpha > 0.0 && *alpha < 1.0) {
      const DZParams dz = dz_beta(*alpha, in.c_nu, in.k);
      const DeltaDerivation dd = derive_delta(*alpha, dz.beta);
      rep.regular_alpha = *alpha;
      rep.regular_beta = dz.beta;
      rep.regular_gamma0 = dd.gamma0;
      rep.regular_delta = dd.delta;
      rep.regular_margin = *alpha - (2.0 / 3.0 - dd.delta);
      if (*rep.regular_margin > 0.0) rep.applicable.push_back("regular-factor-energy (derived candidate)");
    }
  }
  if (rep.product_margin > Rational(0)) rep.applicable.push_back("product-dimension");
  return rep;
}

std::string ThresholdReport::to_text() const {
  std::ostringstream out;
  out << "dimension=" << dimension << "\n";
  out << "dims=";
  for (std::size_t j = 0; j < dims.size(); ++j) out << (j ? "," : "") << prodist::to_string(dims[j]);
  out << "\n";
  out << "total_dim=" << prodist::to_string(total_dim) << "\n";
  if (imbalance_margin) {
    out << "imbalance_margin=" << prodist::to_string(*imbalance_margin) << "\n";
    out << "imbalance_margin_real=" << format_double(to_double(*imbalance_margin)) << "\n";
  }
  out << "product_threshold=" << prodist::to_string(product_threshold) << "\n";
  out << "product_margin=" << prodist::to_string(product_margin) << "\n";
  out << "product_margin_real=" << format_double(to_double(product_margin)) << "\n";
  out << "c_nu=" << format_double(c_nu) << "\n";
  out << "dz_k=" << format_double(k) << "\n";
  if (regular_delta) {
    out << "regular_alpha=" << format_double(*regular_alpha) << "\n";
    out << "regular_beta=" << format_double(*regular_beta) << "\n";
    out << "regular_gamma0=" << format_double(*regular_gamma0) << "\n";
    out << "regular_delta=" << format_double(*regular_delta) << "\n";
    out << "regular_delta_label=derived candidate\n";
    out << "regular_margin=" << format_double(*regular_margin) << "\n";
  }
  out << "applicable=";
  for (std::size_t i = 0; i < applicable.size(); ++i) out << (i ? ";" : "") << applicable[i];
  out << "\n";
  return out.str();
}

}  // namespace prodist
