#include "prodist/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "prodist/error.hpp"
#include "prodist/numeric.hpp"

namespace prodist {

namespace {

using nlohmann::json;

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ExperimentKind::cantor, "cantor"},         {ExperimentKind::regularity, "regularity"},
    {ExperimentKind::energy, "energy"},         {ExperimentKind::spherical, "spherical"},
    {ExperimentKind::solid, "solid"},           {ExperimentKind::stationary, "stationary"},
    {ExperimentKind::mattila, "mattila"},       {ExperimentKind::distance, "distance"},
    {ExperimentKind::thresholds, "thresholds"}, {ExperimentKind::full_report, "full-report"},
};

[[noreturn]] void fail(const std::string& field, const std::string& reason) {
  throw ValidationError(field + ": " + reason);
}

template <typename T>
T get_as(const json& node, const std::string& field) {
  try {
    return node.get<T>();
  } catch (const json::exception&) {
    fail(field, "wrong type (" + std::string(node.type_name()) + ")");
  }
}

double get_number(const json& node, const std::string& field) {
  if (!node.is_number()) fail(field, "must be a number");
  return node.get<double>();
}

int get_int(const json& node, const std::string& field) {
  if (!node.is_number_integer()) fail(field, "must be an integer");
  return get_as<int>(node, field);
}

CantorSpec parse_measure(const json& node, const std::string& field) {
  if (!node.is_object()) fail(field, "must be an object with base, digits, level");
  CantorSpec spec;
  for (const auto& [key, value] : node.items()) {
    const std::string sub = field + "." + key;
    if (key == "base") {
      spec.base = get_int(value, sub);
    } else if (key == "level") {
      spec.level = get_int(value, sub);
    } else if (key == "digits") {
      if (!value.is_array()) fail(sub, "must be an array of integers");
      spec.digits.clear();
      for (std::size_t i = 0; i < value.size(); ++i) {
        spec.digits.push_back(get_int(value[i], sub + "[" + std::to_string(i) + "]"));
      }
    } else {
      fail(sub, "unknown field");
    }
  }
  for (const char* required : {"base", "digits", "level"}) {
    if (!node.contains(required)) fail(field + "." + required, "missing");
  }
  return spec;
}

Sweep parse_sweep(const json& node) {
  if (!node.is_object()) fail("sweep", "must be an object with min, max, count");
  Sweep sweep;
  for (const auto& [key, value] : node.items()) {
    if (key == "min") {
      sweep.min = get_number(value, "sweep.min");
    } else if (key == "max") {
      sweep.max = get_number(value, "sweep.max");
    } else if (key == "count") {
      sweep.count = get_int(value, "sweep.count");
    } else {
      fail("sweep." + key, "unknown field");
    }
  }
  for (const char* required : {"min", "max", "count"}) {
    if (!node.contains(required)) fail(std::string("sweep.") + required, "missing");
  }
  return sweep;
}

bool product_kind(ExperimentKind kind) {
  return kind == ExperimentKind::spherical || kind == ExperimentKind::mattila ||
         kind == ExperimentKind::distance || kind == ExperimentKind::full_report;
}

bool single_measure_kind(ExperimentKind kind) {
  return kind == ExperimentKind::regularity || kind == ExperimentKind::energy ||
         kind == ExperimentKind::solid;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  throw ValidationError("kind: unknown experiment kind");
}

ExperimentKind parse_kind(const std::string& name) {
  for (const auto& k : kKindNames) {
    if (name == k.name) return k.kind;
  }
  if (name == "full_report") return ExperimentKind::full_report;
  fail("kind", "unknown experiment kind '" + name + "'");
}

std::string to_string(SphereWeight weight) {
  switch (weight) {
    case SphereWeight::none:
      return "none";
    case SphereWeight::sin_theta:
      return "sin_theta";
    case SphereWeight::cos_theta:
      return "cos_theta";
  }
  return "none";
}

SphereWeight parse_weight(const std::string& name) {
  if (name == "none") return SphereWeight::none;
  if (name == "sin_theta") return SphereWeight::sin_theta;
  if (name == "cos_theta") return SphereWeight::cos_theta;
  fail("weight", "must be none, sin_theta or cos_theta, got '" + name + "'");
}

void Sweep::validate(const std::string& field) const {
  if (count < 3) fail(field + ".count", "a sweep needs at least 3 points, got " + std::to_string(count));
  if (!(min > 0.0) || !std::isfinite(min)) fail(field + ".min", "must be positive");
  if (!(max > min) || !std::isfinite(max)) fail(field + ".max", "must exceed min");
}

std::vector<double> Sweep::values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  const double ratio = std::log(max / min);
  for (int i = 0; i < count; ++i) {
    if (i == 0) {
      out.push_back(min);
    } else if (i == count - 1) {
      out.push_back(max);
    } else {
      out.push_back(min * std::exp(ratio * i / (count - 1)));
    }
  }
  return out;
}

std::size_t ExperimentConfig::dimension() const {
  if (kind == ExperimentKind::thresholds && !dims.empty()) return dims.size();
  if (kind == ExperimentKind::stationary) return 2;
  return product_kind(kind) || kind == ExperimentKind::thresholds ? measures.size() : 1;
}

bool ExperimentConfig::needs_seed() const {
  return (kind == ExperimentKind::spherical || kind == ExperimentKind::mattila ||
          kind == ExperimentKind::full_report) &&
         measures.size() >= 3;
}

void ExperimentConfig::validate() const {
  for (std::size_t i = 0; i < measures.size(); ++i) {
    try {
      measures[i].validate();
    } catch (const ValidationError& e) {
      throw ValidationError("measures[" + std::to_string(i) + "]." + e.what());
    }
  }
  if (single_measure_kind(kind) && measures.size() != 1) {
    fail("measures", to_string(kind) + " needs exactly one measure, got " + std::to_string(measures.size()));
  }
  if (product_kind(kind) && measures.size() < 2) {
    fail("measures", to_string(kind) + " needs at least two factors, got " + std::to_string(measures.size()));
  }
  if (kind == ExperimentKind::cantor && measures.empty()) fail("measures", "at least one measure required");
  if (kind == ExperimentKind::thresholds && dims.empty() && measures.size() < 2) {
    fail("dims", "thresholds need dims or at least two measures");
  }
  if (kind == ExperimentKind::thresholds && !dims.empty() && dims.size() < 2) {
    fail("dims", "at least two dimensions required");
  }
  if (sweep) sweep->validate("sweep");
  if ((kind == ExperimentKind::spherical || kind == ExperimentKind::solid ||
       kind == ExperimentKind::stationary) &&
      !sweep) {
    fail("sweep", to_string(kind) + " requires a t sweep");
  }
  if (!(gamma0 > 0.0 && gamma0 < 0.5)) fail("gamma0", "must lie in (0, 1/2), got " + format_double(gamma0));
  if (!(dz_k > 0.0) || !std::isfinite(dz_k)) fail("dz_k", "must be positive");
  if (!(cutoff_scale > 1.0) || !std::isfinite(cutoff_scale)) fail("cutoff_scale", "must exceed 1");
  if (parallelism < 1) fail("parallelism", "must be >= 1");
  if (output.empty()) fail("output", "must be a nonempty path");
  if (!(regularity_cap >= 1.0)) fail("regularity_cap", "must be >= 1");
  if (!(std::hypot(gap[0], gap[1]) > 0.0)) fail("gap", "must be nonzero");
  if (!(truncation >= 1.0)) fail("truncation", "must be >= 1");
  if (points_per_octave < 1) fail("points_per_octave", "must be >= 1");
  if (!(bin_width > 0.0)) fail("bin_width", "must be positive");
  if (coordinate && product_kind(kind) && *coordinate >= measures.size()) {
    fail("coordinate", "must be below the number of factors");
  }
  if (needs_seed() && !seed) fail("seed", "required when Monte Carlo sphere sampling is used (d >= 3)");
}

ExperimentConfig parse_config(const std::string& json_text, bool validate) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: not valid JSON (") + e.what() + ")");
  }
  if (!root.is_object()) fail("config", "top level must be an object");
  ExperimentConfig cfg;
  if (!root.contains("kind")) fail("kind", "missing");
  for (const auto& [key, value] : root.items()) {
    if (key == "kind") {
      cfg.kind = parse_kind(get_as<std::string>(value, key));
    } else if (key == "measures") {
      if (!value.is_array()) fail(key, "must be an array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        cfg.measures.push_back(parse_measure(value[i], "measures[" + std::to_string(i) + "]"));
      }
    } else if (key == "sweep") {
      cfg.sweep = parse_sweep(value);
    } else if (key == "gamma0") {
      cfg.gamma0 = get_number(value, key);
    } else if (key == "dz_k") {
      cfg.dz_k = get_number(value, key);
    } else if (key == "cutoff_scale") {
      cfg.cutoff_scale = get_number(value, key);
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) fail(key, "must be a nonnegative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "parallelism") {
      cfg.parallelism = get_int(value, key);
    } else if (key == "output") {
      cfg.output = get_as<std::string>(value, key);
    } else if (key == "weight") {
      cfg.weight = parse_weight(get_as<std::string>(value, key));
    } else if (key == "regularity_cap") {
      cfg.regularity_cap = get_number(value, key);
    } else if (key == "gap") {
      if (!value.is_array() || value.size() != 2) fail(key, "must be an array of two numbers");
      cfg.gap = {get_number(value[0], "gap[0]"), get_number(value[1], "gap[1]")};
    } else if (key == "truncation") {
      cfg.truncation = get_number(value, key);
    } else if (key == "points_per_octave") {
      cfg.points_per_octave = get_int(value, key);
    } else if (key == "bin_width") {
      cfg.bin_width = get_number(value, key);
    } else if (key == "coordinate") {
      if (!value.is_number_unsigned()) fail(key, "must be a nonnegative integer");
      cfg.coordinate = value.get<std::size_t>();
    } else if (key == "dims") {
      if (!value.is_array()) fail(key, "must be an array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string sub = "dims[" + std::to_string(i) + "]";
        if (!value[i].is_string()) fail(sub, "must be a string such as \"3/10\" or \"0.3\"");
        cfg.dims.push_back(value[i].get<std::string>());
      }
    } else {
      fail(key, "unknown field");
    }
  }
  if (validate) cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const ExperimentConfig& config, bool include_output) {
  json root;
  root["kind"] = to_string(config.kind);
  json measures = json::array();
  for (const auto& m : config.measures) {
    measures.push_back({{"base", m.base}, {"digits", m.digits}, {"level", m.level}});
  }
  root["measures"] = measures;
  if (config.sweep) {
    root["sweep"] = {{"min", config.sweep->min}, {"max", config.sweep->max}, {"count", config.sweep->count}};
  }
  root["gamma0"] = config.gamma0;
  root["dz_k"] = config.dz_k;
  root["cutoff_scale"] = config.cutoff_scale;
  if (config.seed) root["seed"] = *config.seed;
  root["parallelism"] = config.parallelism;
  if (include_output) root["output"] = config.output;
  root["weight"] = to_string(config.weight);
  root["regularity_cap"] = config.regularity_cap;
  root["gap"] = {config.gap[0], config.gap[1]};
  root["truncation"] = config.truncation;
  root["points_per_octave"] = config.points_per_octave;
  root["bin_width"] = config.bin_width;
  if (config.coordinate) root["coordinate"] = *config.coordinate;
  if (!config.dims.empty()) root["dims"] = config.dims;
  return root.dump(2) + "\n";
}

}  // namespace prodist
