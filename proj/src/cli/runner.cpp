#include "prodist/runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "prodist/energy.hpp"
#include "prodist/error.hpp"
#include "prodist/fit.hpp"
#include "prodist/fourier.hpp"
#include "prodist/geometry.hpp"
#include "prodist/numeric.hpp"

namespace prodist {

namespace {

using nlohmann::json;

// Rows of reals written with the shortest round-trip representation.
class Csv {
 public:
  explicit Csv(const std::string& header) { out_ << header << '\n'; }

  Csv& cell(double v) { return raw(format_double(v)); }
  Csv& cell(std::int64_t v) { return raw(std::to_string(v)); }
  Csv& cell(std::size_t v) { return raw(std::to_string(v)); }
  Csv& raw(const std::string& s) {
    if (!first_) out_ << ',';
    out_ << s;
    first_ = false;
    return *this;
  }
  void end() {
    out_ << '\n';
    first_ = true;
  }
  void comment(const std::string& key, double v) { out_ << "# " << key << '=' << format_double(v) << '\n'; }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
  bool first_ = true;
};

struct Context {
  const ExperimentConfig& cfg;
  ExperimentOutput out;
  json results = json::object();

  void emit(const std::string& name, std::string contents) {
    out.files.push_back({name, std::move(contents)});
  }
};

std::vector<GridMeasure> build_factors(const ExperimentConfig& cfg) {
  std::vector<GridMeasure> out;
  for (const auto& spec : cfg.measures) out.push_back(build_cantor(spec));
  return out;
}

ProductMeasure build_product_of(const ExperimentConfig& cfg) {
  std::vector<double> dims;
  for (const auto& spec : cfg.measures) dims.push_back(spec.nominal_dimension());
  return build_product(build_factors(cfg), dims);
}

// base^-j for j = 1 .. level - 1.
std::vector<double> base_scales(const CantorSpec& spec) {
  std::vector<double> out;
  for (int j = 1; j < spec.level; ++j) out.push_back(std::pow(static_cast<double>(spec.base), -j));
  return out;
}

std::vector<double> t_values(const ExperimentConfig& cfg, double cap) {
  if (cfg.sweep) return cfg.sweep->values();
  const double top = std::min(243.0, cap);
  if (!(top > 3.0)) throw ValidationError("sweep: default t range [3, 243] is empty below the validity cap");
  return Sweep{3.0, top, 5}.values();
}

json fit_json(const LoglogFit& fit) {
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"stderr", fit.stderr_slope},
          {"r_squared", fit.r_squared},
          {"points", fit.count}};
}

void run_cantor(Context& ctx) {
  json rows = json::array();
  for (std::size_t i = 0; i < ctx.cfg.measures.size(); ++i) {
    const auto& spec = ctx.cfg.measures[i];
    const auto nu = build_cantor(spec);
    ctx.emit("measure_" + std::to_string(i) + ".txt", to_text(nu));
    rows.push_back({{"base", spec.base},
                    {"digits", spec.digits},
                    {"level", spec.level},
                    {"atoms", nu.size()},
                    {"dimension", spec.nominal_dimension()}});
  }
  ctx.results["cantor"] = {{"measures", rows}};
}

void run_regularity(Context& ctx, const CantorSpec& spec, const std::string& file) {
  const auto nu = build_cantor(spec);
  const double alpha = spec.nominal_dimension();
  const auto scales = ctx.cfg.sweep && ctx.cfg.kind == ExperimentKind::regularity ? ctx.cfg.sweep->values()
                                                                                   : base_scales(spec);
  const auto rep = check_regularity(nu, alpha, scales, ctx.cfg.regularity_cap);
  Csv csv("r,min_ratio,max_ratio");
  for (const auto& row : rep.scales) {
    csv.cell(row.r).cell(row.min_ratio).cell(row.max_ratio).end();
  }
  ctx.emit(file, csv.str());
  json res = {{"alpha", alpha},           {"c_nu", rep.c_nu}, {"c_lower", rep.c_lower},
              {"c_upper", rep.c_upper},   {"cap", rep.cap},   {"pass", rep.pass}};
  if (scales.size() >= 3) res["frostman"] = fit_json(frostman_fit(nu, scales));
  ctx.results["regularity"] = res;
}

void run_energy(Context& ctx, const CantorSpec& spec, const std::string& file) {
  const auto nu = build_cantor(spec);
  const double alpha = spec.nominal_dimension();
  std::vector<double> rs;
  if (ctx.cfg.sweep && ctx.cfg.kind == ExperimentKind::energy) {
    rs = ctx.cfg.sweep->values();
  } else {
    rs = base_scales(spec);
    if (rs.size() < 3) rs = default_energy_scales(nu);
  }
  const auto prof = energy_profile(nu, rs, alpha, ctx.cfg.parallelism);
  Csv csv("r,E,log_r,log_E");
  for (const auto& s : prof.samples) {
    csv.cell(s.r).cell(s.energy).cell(std::log(s.r)).cell(std::log(s.energy)).end();
  }
  csv.comment("slope", prof.fitted_exponent);
  csv.comment("stderr", prof.stderr_exponent);
  csv.comment("alpha_ref", prof.alpha_ref);
  ctx.emit(file, csv.str());

  json res = {{"alpha", alpha},
              {"slope", prof.fitted_exponent},
              {"stderr", prof.stderr_exponent},
              {"excess", prof.fitted_exponent - alpha},
              {"trivial_bound_ok", prof.fitted_exponent >= alpha - 0.05}};
  const auto scales = base_scales(spec);
  double c_nu = 1.0;
  if (!scales.empty()) c_nu = check_regularity(nu, alpha, scales, 1e300).c_nu;
  res["c_nu"] = c_nu;
  if (alpha > 0.0 && alpha < 1.0) {
    const auto dz = dz_beta(alpha, c_nu, ctx.cfg.dz_k);
    res["beta"] = dz.beta;
    res["k"] = dz.k;
    res["dz_margin"] = prof.fitted_exponent - alpha - dz.beta;
  }
  ctx.results["energy"] = res;
}

void run_solid(Context& ctx, const GridMeasure& nu, double alpha, std::span<const double> ts,
               const std::string& file) {
  Csv csv("t,solid,nodes");
  std::vector<std::pair<double, double>> pts;
  const auto values = parallel_map(ts.size(), ctx.cfg.parallelism,
                                   [&](std::size_t i) { return solid_average(nu, ts[i], -1.0, 1.0); });
  for (std::size_t i = 0; i < ts.size(); ++i) {
    csv.cell(ts[i]).cell(values[i].value).cell(values[i].nodes).end();
    pts.emplace_back(ts[i], values[i].value);
  }
  ctx.emit(file, csv.str());
  const auto fit = loglog_fit(pts);
  ctx.results["solid"] = {{"alpha", alpha},
                          {"fit", fit_json(fit)},
                          {"bound", -alpha + 0.1},
                          {"ok", fit.slope <= -alpha + 0.1}};
}

void run_spherical(Context& ctx, const ProductMeasure& mu, SphereWeight weight, std::span<const double> ts,
                   const std::string& file) {
  const auto quad = default_quadrature(mu.dimension(), ctx.cfg.seed.value_or(0));
  const auto series = spherical_average_series(mu, ts, weight, quad, ctx.cfg.parallelism);
  Csv csv("t,sigma,weight,quadrature_nodes,stderr");
  for (const auto& p : series.points) {
    csv.cell(p.t).cell(p.value).raw(to_string(weight)).cell(p.nodes).cell(p.stderr_value).end();
  }
  ctx.emit(file, csv.str());
  double alpha = 0.0;
  for (double s : mu.dims()) alpha = std::max(alpha, s);
  json res = {{"weight", to_string(weight)},
              {"alpha", alpha},
              {"slope", series.fitted_decay},
              {"stderr", series.stderr_decay},
              {"bound", -alpha + 0.1},
              {"ok", series.fitted_decay <= -alpha + 0.1}};
  // The planar weighted average is dominated by twice the solid average of
  // the factor whose coordinate does not carry the weight.
  if (mu.dimension() == 2 && weight != SphereWeight::none) {
    const std::size_t j = weight == SphereWeight::sin_theta ? 0 : 1;
    bool ok = true;
    double worst = 0.0;
    for (const auto& p : series.points) {
      if (p.t < 1.0) continue;
      const double solid = solid_average(mu.factor(j), p.t, -1.0, 1.0).value;
      worst = std::max(worst, p.value / (2.0 * solid));
      ok = ok && p.value <= 2.0 * solid * (1.0 + 1e-6);
    }
    res["solid_bound_factor"] = j;
    res["solid_bound_ok"] = ok;
    res["solid_bound_worst_ratio"] = worst;
  }
  ctx.results["spherical"] = res;
}

void run_stationary(Context& ctx) {
  const auto ts = ctx.cfg.sweep->values();
  const auto rep = stationary_phase_check(ctx.cfg.gap, ts);
  Csv csv("t,exact_re,exact_im,main,resid");
  for (const auto& row : rep.rows) {
    csv.cell(row.t).cell(row.exact.real()).cell(row.exact.imag()).cell(row.main).cell(row.resid).end();
  }
  ctx.emit("stationary.csv", csv.str());
  ctx.results["stationary"] = {{"gap", {rep.gap[0], rep.gap[1]}},
                               {"residual_slope", rep.residual_slope},
                               {"stderr", rep.residual_slope_stderr},
                               {"fit_points", rep.fit_points},
                               {"ok", rep.residual_slope <= -1.4}};
}

void run_mattila(Context& ctx, const ProductMeasure& mu, double truncation, bool weighted,
                 const std::string& file) {
  const auto quad = default_quadrature(mu.dimension(), ctx.cfg.seed.value_or(0));
  const auto est = mattila_truncated(mu, truncation, weighted, quad, ctx.cfg.points_per_octave,
                                     ctx.cfg.parallelism);
  Csv csv("t,sigma_w,integrand,partial_value");
  for (const auto& s : est.samples) csv.cell(s.t).cell(s.sigma).cell(s.integrand).cell(s.partial).end();
  ctx.emit(file, csv.str());
  ctx.results["mattila"] = {{"truncation", est.truncation},
                            {"weighted", est.weighted},
                            {"value", est.value},
                            {"integrand_slope", est.integrand_slope},
                            {"doubling_ratios", est.doubling_ratios},
                            {"converging", est.integrand_slope < -1.0},
                            {"total_dim", mu.total_dim()}};
}

void run_distance(Context& ctx, const ProductMeasure& mu) {
  const bool weighted = ctx.cfg.weight != SphereWeight::none;
  const auto dm = distance_measure(mu, ctx.cfg.bin_width, weighted, ctx.cfg.coordinate);
  Csv csv("bin_index,bin_left,mass");
  for (const auto& [k, m] : dm.bins) csv.cell(k).cell(static_cast<double>(k) * dm.bin_width).cell(m).end();
  ctx.emit("distance.csv", csv.str());

  std::vector<double> widths;
  for (int k = 0; k < 4; ++k) widths.push_back(dm.bin_width * std::pow(2.0, k));
  Csv cov("width,nonempty_bins,covered_length,density_sq_norm");
  json rows = json::array();
  for (const auto& row : coverage_report(dm, widths)) {
    cov.cell(row.width).cell(row.nonempty_bins).cell(row.covered_length).cell(row.density_sq_norm).end();
    rows.push_back(row.covered_length);
  }
  ctx.emit("coverage.csv", cov.str());
  ctx.results["distance"] = {{"weighted", weighted},
                             {"coordinate", dm.coordinate},
                             {"bins", dm.bins.size()},
                             {"total_mass", dm.total_mass},
                             {"diagonal_mass", dm.diagonal_mass},
                             {"covered_length", rows}};
}

// Nominal Cantor dimensions are irrational; they enter the exact threshold
// arithmetic rounded to nine decimals.
Rational rational_from(double x) {
  constexpr std::int64_t kDen = 1000000000;
  return Rational(static_cast<std::int64_t>(std::llround(x * static_cast<double>(kDen))), kDen);
}

void run_thresholds(Context& ctx) {
  ThresholdInputs in;
  if (!ctx.cfg.dims.empty()) {
    for (std::size_t i = 0; i < ctx.cfg.dims.size(); ++i) {
      try {
        in.dims.push_back(parse_rational(ctx.cfg.dims[i]));
      } catch (const ValidationError& e) {
        throw ValidationError("dims[" + std::to_string(i) + "]: " + e.what());
      }
    }
  } else {
    for (const auto& spec : ctx.cfg.measures) in.dims.push_back(rational_from(spec.nominal_dimension()));
    const auto& first = ctx.cfg.measures.front();
    const bool same = std::all_of(ctx.cfg.measures.begin(), ctx.cfg.measures.end(), [&](const CantorSpec& s) {
      return s.nominal_dimension() == first.nominal_dimension();
    });
    if (same) in.alpha = first.nominal_dimension();
  }
  in.k = ctx.cfg.dz_k;
  const auto rep = threshold_report(in);
  ctx.emit("thresholds.txt", rep.to_text());
  json res = {{"d", rep.dimension},
              {"total_dim", to_string(rep.total_dim)},
              {"total_dim_value", to_double(rep.total_dim)},
              {"product_threshold", to_string(rep.product_threshold)},
              {"product_margin", to_string(rep.product_margin)},
              {"product_margin_value", to_double(rep.product_margin)},
              {"applicable", rep.applicable}};
  if (rep.imbalance_margin) {
    res["imbalance_margin"] = to_string(*rep.imbalance_margin);
    res["imbalance_margin_value"] = to_double(*rep.imbalance_margin);
  }
  if (rep.regular_margin) {
    res["regular_alpha"] = *rep.regular_alpha;
    res["regular_beta"] = *rep.regular_beta;
    res["regular_delta"] = *rep.regular_delta;
    res["regular_margin"] = *rep.regular_margin;
  }
  ctx.results["thresholds"] = res;
}

void run_angular(Context& ctx, const ProductMeasure& mu, std::span<const double> ts) {
  const CutoffFunction cutoff{CutoffKind::fejer, ctx.cfg.cutoff_scale};
  const auto rows = parallel_map(ts.size(), ctx.cfg.parallelism, [&](std::size_t i) {
    return angular_decomposition(mu, ts[i], ctx.cfg.gamma0, cutoff);
  });
  Csv csv("t,gamma0,theta_cut,near_zero,middle,near_half_pi,energy_a,energy_b,cs_bound");
  bool ok = true;
  for (const auto& r : rows) {
    csv.cell(r.t).cell(r.gamma0).cell(r.theta_cut).cell(r.near_zero).cell(r.middle).cell(r.near_half_pi);
    csv.cell(r.energy_a).cell(r.energy_b).cell(r.cs_bound).end();
    ok = ok && r.middle <= r.cs_bound;
  }
  ctx.emit("angular.csv", csv.str());
  ctx.results["angular"] = {{"gamma0", ctx.cfg.gamma0},
                            {"cutoff_scale", ctx.cfg.cutoff_scale},
                            {"points", rows.size()},
                            {"middle_within_bound", ok}};
}

void run_full_report(Context& ctx) {
  const auto mu = build_product_of(ctx.cfg);
  const auto ts = t_values(ctx.cfg, validity_cap(mu));
  // Factor statistics use the factor of largest dimension.
  std::size_t lead = 0;
  for (std::size_t j = 1; j < ctx.cfg.measures.size(); ++j) {
    if (ctx.cfg.measures[j].nominal_dimension() > ctx.cfg.measures[lead].nominal_dimension()) lead = j;
  }
  const auto& spec = ctx.cfg.measures[lead];
  run_regularity(ctx, spec, "regularity.csv");
  run_energy(ctx, spec, "energy.csv");
  std::vector<double> solid_ts;
  for (double t : ts) {
    if (t >= 1.0) solid_ts.push_back(t);
  }
  run_solid(ctx, mu.factor(lead), spec.nominal_dimension(), solid_ts, "solid.csv");
  run_spherical(ctx, mu, ctx.cfg.weight, ts, "spherical.csv");
  run_mattila(ctx, mu, std::min(ctx.cfg.truncation, validity_cap(mu)), ctx.cfg.weight != SphereWeight::none,
              "mattila.csv");
  if (mu.dimension() == 2) run_angular(ctx, mu, solid_ts);
  run_thresholds(ctx);
}

std::string manifest_text(const ExperimentConfig& cfg, const ExperimentOutput& out, const json& results) {
  json m;
  const std::string canonical = serialize_config(cfg, false);
  m["config"] = json::parse(canonical);
  m["config_sha256"] = sha256_hex(canonical);
  m["d"] = cfg.dimension();
  m["kind"] = to_string(cfg.kind);
  m["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  m["version"] = kVersion;
  json files = json::object();
  for (const auto& f : out.files) files[f.name] = sha256_hex(f.contents);
  m["files"] = files;
  m["results"] = results;
  return m.dump(2) + "\n";
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

ExperimentOutput compute_experiment(const ExperimentConfig& config) {
  config.validate();
  Context ctx{config, {}, json::object()};
  switch (config.kind) {
    case ExperimentKind::cantor:
      run_cantor(ctx);
      break;
    case ExperimentKind::regularity:
      run_regularity(ctx, config.measures.front(), "regularity.csv");
      break;
    case ExperimentKind::energy:
      run_energy(ctx, config.measures.front(), "energy.csv");
      break;
    case ExperimentKind::solid: {
      const auto ts = config.sweep->values();
      run_solid(ctx, build_cantor(config.measures.front()), config.measures.front().nominal_dimension(), ts,
                "solid.csv");
      break;
    }
    case ExperimentKind::spherical: {
      const auto mu = build_product_of(config);
      const auto ts = config.sweep->values();
      run_spherical(ctx, mu, config.weight, ts, "spherical.csv");
      break;
    }
    case ExperimentKind::stationary:
      run_stationary(ctx);
      break;
    case ExperimentKind::mattila:
      run_mattila(ctx, build_product_of(config), config.truncation, config.weight != SphereWeight::none,
                  "mattila.csv");
      break;
    case ExperimentKind::distance:
      run_distance(ctx, build_product_of(config));
      break;
    case ExperimentKind::thresholds:
      run_thresholds(ctx);
      break;
    case ExperimentKind::full_report:
      run_full_report(ctx);
      break;
  }
  ctx.out.manifest = manifest_text(config, ctx.out, ctx.results);
  return std::move(ctx.out);
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  auto out = compute_experiment(config);
  namespace fs = std::filesystem;
  const fs::path dir(config.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("output: cannot create '" + config.output + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& contents) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    f << contents;
    if (!f) throw ValidationError("output: cannot write '" + (dir / name).string() + "'");
  };
  for (const auto& file : out.files) write(file.name, file.contents);
  write(kManifestName, out.manifest);
  return out;
}

}  // namespace prodist
