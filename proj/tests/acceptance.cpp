// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "prodist/config.hpp"
#include "prodist/energy.hpp"
#include "prodist/fit.hpp"
#include "prodist/fourier.hpp"
#include "prodist/geometry.hpp"
#include "prodist/measures.hpp"
#include "prodist/runner.hpp"

using namespace prodist;

namespace {

const double kAlpha = std::log(2.0) / std::log(3.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ProductMeasure square(const CantorSpec& spec) {
  const auto nu = build_cantor(spec);
  return build_product({nu, nu}, {spec.nominal_dimension(), spec.nominal_dimension()});
}

std::vector<double> powers(double base, int from, int to) {
  std::vector<double> out;
  for (int k = from; k <= to; ++k) out.push_back(std::pow(base, k));
  return out;
}

Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int m = 0; m < 200; ++m) {
    const auto nu = oracle::random_measure(rng, 2, 8, 1 + rng() % 40);
    for (int k = 1; k <= 8; ++k) {
      const double r = std::ldexp(1.0, -k);
      const double a = additive_energy(nu, r, EnergyAlgorithm::bruteforce);
      const double b = additive_energy(nu, r, EnergyAlgorithm::autocorrelation);
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-10 && elapsed < 10.0,
          "200 measures x 8 dyadic r, max rel diff " + num(worst) + ", " + num(elapsed) + " s"};
}

Outcome parseval() {
  std::mt19937_64 rng(2);
  std::vector<GridMeasure> measures;
  const CantorSpec specs[] = {{3, {0, 2}, 6}, {3, {0, 2}, 8}, {2, {0, 1}, 10}, {4, {0, 3}, 7},
                              {5, {0, 2, 4}, 5}, {4, {0, 1, 3}, 6}, {7, {1, 4}, 5}, {6, {0, 2, 5}, 6},
                              {3, {1}, 4}, {2, {0, 1}, 6}};
  for (const auto& s : specs) measures.push_back(build_cantor(s));
  while (measures.size() < 50) {
    std::size_t atoms = 1 + rng() % 1024;
    measures.push_back(oracle::random_measure(rng, 2, 11, atoms));
  }
  std::uniform_real_distribution<double> t_dist(1.0, 30.0);
  double worst = 0.0;
  std::size_t largest = 0;
  for (const auto& nu : measures) {
    const CutoffFunction psi{CutoffKind::fejer, 2.0};
    const auto e = smoothed_energy(nu, t_dist(rng), psi);
    worst = std::max(worst, std::abs(e.space_side - e.fourier_side) / e.space_side);
    largest = std::max(largest, nu.size());
  }
  return {worst <= 1e-6,
          "50 measures (up to " + std::to_string(largest) + " atoms), max rel diff " + num(worst)};
}

Outcome middle_thirds_suite() {
  const auto start = std::chrono::steady_clock::now();
  const auto level8 = build_cantor({3, {0, 2}, 8});
  std::vector<double> scales;
  for (int j = 1; j <= 7; ++j) scales.push_back(std::pow(3.0, -j));
  const auto reg = check_regularity(level8, kAlpha, scales, 4.0);

  const auto level9 = build_cantor({3, {0, 2}, 9});
  std::vector<double> rs;
  for (int j = 1; j <= 8; ++j) rs.push_back(std::pow(3.0, -j));
  const auto prof = energy_profile(level9, rs, kAlpha);
  const auto dz = dz_beta(kAlpha, reg.c_nu);
  const double elapsed = seconds_since(start);
  const bool ok = reg.pass && reg.c_nu <= 4.0 && prof.fitted_exponent >= kAlpha - 0.05 && elapsed < 30.0;
  return {ok, "C_nu " + num(reg.c_nu) + " (level 8), E(r) exponent " + num(prof.fitted_exponent, 4) +
                  " vs alpha " + num(kAlpha, 4) + ", excess " + num(prof.fitted_exponent - kAlpha) +
                  " (DZ beta " + num(dz.beta) + "), " + num(elapsed) + " s"};
}

Outcome solid_average_decay() {
  const auto nu = build_cantor({3, {0, 2}, 8});
  std::vector<std::pair<double, double>> pts;
  for (double t : powers(3.0, 1, 6)) pts.emplace_back(t, solid_average(nu, t, -1.0, 1.0).value);
  const auto fit = loglog_fit(pts);
  return {fit.slope <= -kAlpha + 0.1, "slope " + num(fit.slope, 4) + " <= " + num(-kAlpha + 0.1, 4)};
}

Outcome weighted_bound() {
  const CantorSpec spec{3, {0, 2}, 8};
  const auto mu = square(spec);
  const auto ts = powers(3.0, 1, 5);
  const auto series = spherical_average_series(mu, ts, SphereWeight::sin_theta, default_quadrature(2));
  bool bounded = true;
  double worst = 0.0;
  for (const auto& p : series.points) {
    const double solid = solid_average(mu.factor(0), p.t, -1.0, 1.0, 1e-8).value;
    worst = std::max(worst, p.value / (2.0 * solid));
    bounded = bounded && p.value <= 2.0 * solid * (1.0 + 1e-6);
  }
  const bool ok = bounded && series.fitted_decay <= -kAlpha + 0.1;
  return {ok, "max sigma_w/(2 solid) " + num(worst) + ", slope " + num(series.fitted_decay, 4) + " <= " +
                  num(-kAlpha + 0.1, 4)};
}

Outcome stationary_phase() {
  std::string detail;
  bool ok = true;
  for (double angle : {kPi / 6, kPi / 4, kPi / 3, kPi / 2, 2 * kPi / 3}) {
    const std::array<double, 2> gap{0.5 * std::cos(angle), 0.5 * std::sin(angle)};
    // t |gap| from 1e2 to 1e4.
    std::vector<double> ts;
    for (int k = 0; k < 9; ++k) ts.push_back(200.0 * std::pow(100.0, k / 8.0));
    const auto rep = stationary_phase_check(gap, ts);
    ok = ok && rep.residual_slope <= -1.4;
    detail += num(rep.residual_slope, 4) + " ";
  }
  const double axis_t[] = {200.0, 2000.0, 20000.0};
  const auto axis = stationary_phase_check({0.5, 0.0}, axis_t);
  bool zero = true;
  for (const auto& row : axis.rows) zero = zero && row.main == 0.0;
  ok = ok && zero;
  return {ok, "residual slopes " + detail + "(<= -1.4); axis gap main term " + (zero ? "== 0" : "nonzero")};
}

Outcome mattila_closed_forms() {
  const auto p = GridMeasure::point_mass(2, 10, 0);
  const auto mu = build_product({p, p}, {0.0, 0.0});
  const double T = 100.0;
  const double u = mattila_truncated(mu, T, false, default_quadrature(2)).value;
  const double w = mattila_truncated(mu, T, true, default_quadrature(2)).value;
  const double eu = 2.0 * kPi * kPi * (T * T - 1.0);
  const double ew = 8.0 * (T * T - 1.0);
  const double du = std::abs(u - eu) / eu;
  const double dw = std::abs(w - ew) / ew;
  return {du <= 1e-6 && dw <= 1e-6, "T = 100, rel err unweighted " + num(du) + ", weighted " + num(dw)};
}

Outcome cauchy_schwarz_split() {
  struct Case {
    CantorSpec spec;
    int k_min;
    int k_max;
  };
  const Case cases[] = {{{3, {0, 2}, 9}, 2, 6}, {{4, {0, 3}, 7}, 2, 5}, {{5, {0, 2, 4}, 6}, 1, 4}};
  const CutoffFunction psi{CutoffKind::fejer, 2.0};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto mu = square(c.spec);
    const double alpha = c.spec.nominal_dimension();
    for (double g0 : {0.05, 0.1, 0.2}) {
      std::vector<std::pair<double, double>> near;
      for (double t : powers(c.spec.base, c.k_min, c.k_max)) {
        const auto d = angular_decomposition(mu, t, g0, psi);
        ok = ok && d.middle <= d.cs_bound * (1.0 + 1e-6);
        near.emplace_back(t, d.near_zero);
      }
      const double slope = loglog_fit(near).slope;
      const double predicted = -g0 * (1.0 - alpha) - alpha;
      ok = ok && slope <= predicted + 0.1;
      detail += "b" + std::to_string(c.spec.base) + "/" + num(g0, 2) + ":" + num(slope, 3) + "(" +
                num(predicted, 3) + ") ";
    }
  }
  return {ok, "middle <= cs_bound everywhere; near-zero slope(predicted) " + detail};
}

Outcome thresholds() {
  ThresholdInputs two;
  two.dims = {parse_rational("9/10"), parse_rational("1/2")};
  ThresholdInputs three;
  three.dims = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  const auto r2 = threshold_report(two);
  const auto r3 = threshold_report(three);
  bool ok = r2.product_threshold == Rational(4, 3) && r3.product_threshold == Rational(9, 5) &&
            r2.imbalance_margin && *r2.imbalance_margin == Rational(3, 10) &&
            r2.product_margin == Rational(1, 15) && r3.product_margin == Rational(-4, 5);

  double worst = 0.0;
  for (auto [alpha, beta] : {std::pair{0.5, 0.02}, std::pair{kAlpha, 0.004}, std::pair{0.25, 0.3}}) {
    const auto d = derive_delta(alpha, beta);
    const double gamma = beta / 2.0;
    double best = -1.0;
    double arg = 0.0;
    const int n = 4000000;
    for (int i = 1; i < n; ++i) {
      const double g0 = 2.0 * gamma * i / n;
      const double v = std::min(g0 * (1.0 - alpha), gamma - g0 / 2.0);
      if (v > best) {
        best = v;
        arg = g0;
      }
    }
    worst = std::max({worst, std::abs(arg - d.gamma0), std::abs(best - d.delta)});
  }
  ok = ok && worst <= 1e-6;
  return {ok, "d=2 -> " + to_string(r2.product_threshold) + ", d=3 -> " + to_string(r3.product_threshold) +
                  ", imbalance margin " + to_string(*r2.imbalance_margin) + ", derive_delta vs grid " + num(worst)};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "prodist_acceptance";
  fs::remove_all(root);
  std::vector<ExperimentConfig> configs;
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::energy;
    c.measures = {CantorSpec{3, {0, 2}, 8}};
    c.parallelism = 2;
    configs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::spherical;
    c.measures = {CantorSpec{3, {0, 2}, 4}, CantorSpec{3, {0, 2}, 4}, CantorSpec{2, {0, 1}, 5}};
    c.sweep = Sweep{1.0, 6.0, 4};
    c.seed = 77;
    c.parallelism = 2;
    configs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::full_report;
    c.measures = {CantorSpec{3, {0, 2}, 6}, CantorSpec{3, {0, 2}, 6}};
    c.truncation = 20.0;
    c.seed = 5;
    configs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::distance;
    c.measures = {CantorSpec{3, {0, 2}, 5}, CantorSpec{4, {0, 3}, 4}};
    configs.push_back(c);
  }
  std::size_t compared = 0;
  bool ok = true;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    auto a = configs[i];
    auto b = configs[i];
    a.output = (root / ("run" + std::to_string(i)) / "a").string();
    b.output = (root / ("run" + std::to_string(i)) / "b").string();
    const auto out = run_experiment(a);
    run_experiment(b);
    std::vector<std::string> names{kManifestName};
    for (const auto& f : out.files) names.push_back(f.name);
    for (const auto& name : names) {
      ok = ok && read_file(fs::path(a.output) / name) == read_file(fs::path(b.output) / name);
      ++compared;
    }
  }
  fs::remove_all(root);
  return {ok, std::to_string(compared) + " files byte-identical across repeated runs"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"oracle equivalence", oracle_equivalence},
      {"smoothed energy Parseval", parseval},
      {"middle-thirds regularity and energy", middle_thirds_suite},
      {"solid average decay", solid_average_decay},
      {"weighted spherical average bound", weighted_bound},
      {"stationary phase residual", stationary_phase},
      {"Mattila closed forms", mattila_closed_forms},
      {"Cauchy-Schwarz angular split", cauchy_schwarz_split},
      {"dimension thresholds", thresholds},
      {"determinism", determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
