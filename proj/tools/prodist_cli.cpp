// prodist command line: one subcommand per experiment kind plus `report`.
//
//   prodist energy --config energy.json --seed 7
//   prodist spherical --measure 3:0,2:6 --measure 3:0,2:6 --sweep 3:81:5 --output out/sph
//   prodist report out

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "prodist/config.hpp"
#include "prodist/error.hpp"
#include "prodist/report.hpp"
#include "prodist/runner.hpp"

namespace {

using prodist::ValidationError;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double to_number(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(field + ": '" + text + "' is not a number");
  }
}

int to_int(const std::string& text, const std::string& field) {
  const double v = to_number(text, field);
  if (v != static_cast<int>(v)) throw ValidationError(field + ": '" + text + "' is not an integer");
  return static_cast<int>(v);
}

// "base:d1,d2,...:level"
prodist::CantorSpec parse_measure_flag(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ValidationError("--measure: expected base:digits:level, got '" + text + "'");
  prodist::CantorSpec spec;
  spec.base = to_int(parts[0], "--measure base");
  spec.digits.clear();
  for (const auto& d : split(parts[1], ',')) spec.digits.push_back(to_int(d, "--measure digits"));
  spec.level = to_int(parts[2], "--measure level");
  return spec;
}

// "min:max:count"
prodist::Sweep parse_sweep_flag(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ValidationError("--sweep: expected min:max:count, got '" + text + "'");
  return {to_number(parts[0], "--sweep min"), to_number(parts[1], "--sweep max"), to_int(parts[2], "--sweep count")};
}

struct Overrides {
  std::string config_path;
  std::vector<std::string> measures;
  std::string sweep;
  std::optional<double> gamma0, dz_k, cutoff_scale, truncation, bin_width, regularity_cap;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism, points_per_octave;
  std::optional<std::size_t> coordinate;
  std::string output, weight, gap, dims;
};

void add_experiment_options(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config_path, "JSON config file");
  sub->add_option("--measure", o.measures, "Cantor factor as base:digits:level (repeatable)");
  sub->add_option("--sweep", o.sweep, "geometric sweep min:max:count");
  sub->add_option("--gamma0", o.gamma0, "angular cut exponent");
  sub->add_option("--dz-k", o.dz_k, "constant K of the energy improvement");
  sub->add_option("--cutoff-scale", o.cutoff_scale, "Fejer cutoff scale");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--parallelism", o.parallelism, "worker threads");
  sub->add_option("-o,--output", o.output, "output directory");
  sub->add_option("--weight", o.weight, "none, sin_theta or cos_theta");
  sub->add_option("--truncation", o.truncation, "Mattila truncation T");
  sub->add_option("--points-per-octave", o.points_per_octave, "Mattila t-grid density");
  sub->add_option("--bin-width", o.bin_width, "distance bin width");
  sub->add_option("--coordinate", o.coordinate, "axis carrying the distance weight");
  sub->add_option("--regularity-cap", o.regularity_cap, "regularity constant cap");
  sub->add_option("--gap", o.gap, "stationary-phase gap x,y");
  sub->add_option("--dims", o.dims, "comma separated factor dimensions, e.g. 9/10,1/2");
}

prodist::ExperimentConfig resolve(prodist::ExperimentKind kind, const Overrides& o) {
  prodist::ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw ValidationError("--config: cannot read '" + o.config_path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    cfg = prodist::parse_config(text.str(), false);
    if (cfg.kind != kind) {
      throw ValidationError("kind: config describes '" + prodist::to_string(cfg.kind) +
                            "' but the subcommand is '" + prodist::to_string(kind) + "'");
    }
  }
  cfg.kind = kind;
  if (!o.measures.empty()) {
    cfg.measures.clear();
    for (const auto& m : o.measures) cfg.measures.push_back(parse_measure_flag(m));
  }
  if (!o.sweep.empty()) cfg.sweep = parse_sweep_flag(o.sweep);
  if (o.gamma0) cfg.gamma0 = *o.gamma0;
  if (o.dz_k) cfg.dz_k = *o.dz_k;
  if (o.cutoff_scale) cfg.cutoff_scale = *o.cutoff_scale;
  if (o.seed) cfg.seed = *o.seed;
  if (o.parallelism) cfg.parallelism = *o.parallelism;
  if (!o.output.empty()) cfg.output = o.output;
  if (!o.weight.empty()) cfg.weight = prodist::parse_weight(o.weight);
  if (o.truncation) cfg.truncation = *o.truncation;
  if (o.points_per_octave) cfg.points_per_octave = *o.points_per_octave;
  if (o.bin_width) cfg.bin_width = *o.bin_width;
  if (o.coordinate) cfg.coordinate = *o.coordinate;
  if (o.regularity_cap) cfg.regularity_cap = *o.regularity_cap;
  if (!o.gap.empty()) {
    const auto parts = split(o.gap, ',');
    if (parts.size() != 2) throw ValidationError("--gap: expected x,y");
    cfg.gap = {to_number(parts[0], "--gap"), to_number(parts[1], "--gap")};
  }
  if (!o.dims.empty()) cfg.dims = split(o.dims, ',');
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale experiments on Cantor product measures"};
  app.require_subcommand(1);

  Overrides overrides;
  std::vector<std::pair<CLI::App*, prodist::ExperimentKind>> experiments;
  for (auto kind : {prodist::ExperimentKind::cantor, prodist::ExperimentKind::regularity,
                    prodist::ExperimentKind::energy, prodist::ExperimentKind::spherical,
                    prodist::ExperimentKind::solid, prodist::ExperimentKind::stationary,
                    prodist::ExperimentKind::mattila, prodist::ExperimentKind::distance,
                    prodist::ExperimentKind::thresholds, prodist::ExperimentKind::full_report}) {
    auto* sub = app.add_subcommand(prodist::to_string(kind), "run the " + prodist::to_string(kind) + " experiment");
    add_experiment_options(sub, overrides);
    experiments.emplace_back(sub, kind);
  }
  std::string report_dir;
  auto* report = app.add_subcommand("report", "summarize every manifest under a directory");
  report->add_option("directory", report_dir, "directory holding experiment outputs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (report->parsed()) {
      const auto text = prodist::emit_report(report_dir);
      std::cout << text;
      return 0;
    }
    for (const auto& [sub, kind] : experiments) {
      if (!sub->parsed()) continue;
      const auto cfg = resolve(kind, overrides);
      const auto out = prodist::run_experiment(cfg);
      for (const auto& f : out.files) std::cout << cfg.output << '/' << f.name << '\n';
      std::cout << cfg.output << '/' << prodist::kManifestName << '\n';
    }
    return 0;
  } catch (const prodist::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const prodist::BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
