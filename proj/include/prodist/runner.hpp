#pragma once

// Runs one configured experiment and writes its CSVs plus a manifest.

#include <string>
#include <string_view>
#include <vector>

#include "prodist/config.hpp"

namespace prodist {

inline constexpr const char* kVersion = "prodist 0.1.0";
inline constexpr const char* kManifestName = "manifest.json";

struct ArtifactFile {
  std::string name;
  std::string contents;
};

struct ExperimentOutput {
  std::vector<ArtifactFile> files;  // in emission order, manifest excluded
  std::string manifest;             // JSON text, sorted keys
};

// Computes every artifact in memory; a pure function of the config.
ExperimentOutput compute_experiment(const ExperimentConfig& config);

// compute_experiment followed by writing into config.output (created if
// missing). Returns the same output.
ExperimentOutput run_experiment(const ExperimentConfig& config);

std::string sha256_hex(std::string_view data);

}  // namespace prodist
