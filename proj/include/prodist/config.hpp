#pragma once

// Experiment configuration: a JSON document, validated field by field.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prodist/fourier.hpp"
#include "prodist/measures.hpp"

namespace prodist {

enum class ExperimentKind {
  cantor,
  regularity,
  energy,
  spherical,
  solid,
  stationary,
  mattila,
  distance,
  thresholds,
  full_report,
};

std::string to_string(ExperimentKind kind);
// Accepts the kebab-case names used on the command line ("full-report").
ExperimentKind parse_kind(const std::string& name);

std::string to_string(SphereWeight weight);
SphereWeight parse_weight(const std::string& name);

// count points spaced geometrically from min to max, both included.
struct Sweep {
  double min = 1.0;
  double max = 1.0;
  int count = 3;

  void validate(const std::string& field) const;
  std::vector<double> values() const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::cantor;
  std::vector<CantorSpec> measures;
  std::optional<Sweep> sweep;
  double gamma0 = 0.1;
  double dz_k = 1.0;
  double cutoff_scale = 2.0;
  std::optional<std::uint64_t> seed;
  int parallelism = 1;
  std::string output = "out";

  // Per-kind settings.
  SphereWeight weight = SphereWeight::sin_theta;  // spherical, mattila
  double regularity_cap = 4.0;                    // regularity
  std::array<double, 2> gap{0.0, 1.0};            // stationary
  double truncation = 27.0;                       // mattila
  int points_per_octave = 8;                      // mattila
  double bin_width = 0.01;                        // distance
  std::optional<std::size_t> coordinate;          // distance, weight axis
  std::vector<std::string> dims;                  // thresholds, exact rationals as text

  // Throws ValidationError naming the offending field.
  void validate() const;
  // Number of product factors, 1 for single-measure kinds.
  std::size_t dimension() const;
  // Monte Carlo sphere sampling is reachable (d >= 3 spherical averages).
  bool needs_seed() const;
};

// With validate = false only syntax and field types are checked, so that
// command-line flags can complete the config before validate() runs.
ExperimentConfig parse_config(const std::string& json_text, bool validate = true);
ExperimentConfig load_config(const std::string& path);

// Canonical JSON text (sorted keys, fixed layout). The output directory is
// left out when include_output is false so that hashes do not depend on it.
std::string serialize_config(const ExperimentConfig& config, bool include_output = true);

}  // namespace prodist
