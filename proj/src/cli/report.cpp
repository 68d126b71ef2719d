#include "prodist/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "prodist/error.hpp"
#include "prodist/runner.hpp"

namespace prodist {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string signed_fixed(double v, int digits = 3) { return (v >= 0.0 ? "+" : "") + fixed(v, digits); }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("report: cannot read '" + p.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double num(const json& node, const char* key) {
  if (!node.contains(key) || !node[key].is_number()) {
    throw ValidationError(std::string("report: result field '") + key + "' missing");
  }
  return node[key].get<double>();
}

std::vector<std::string> describe(const json& results) {
  std::vector<std::string> lines;
  if (results.contains("cantor")) {
    for (const auto& m : results["cantor"]["measures"]) {
      std::string digits;
      for (const auto& d : m["digits"]) digits += (digits.empty() ? "" : ",") + std::to_string(d.get<int>());
      lines.push_back("measure base " + std::to_string(m["base"].get<int>()) + " digits {" + digits +
                      "} level " + std::to_string(m["level"].get<int>()) + ": " +
                      std::to_string(m["atoms"].get<std::size_t>()) + " atoms, dimension " +
                      fixed(num(m, "dimension")));
    }
  }
  if (results.contains("regularity")) {
    const auto& r = results["regularity"];
    std::string line = "regularity C_nu = " + fixed(num(r, "c_nu")) + (r["pass"].get<bool>() ? " ≤" : " >") +
                       " cap " + fixed(num(r, "cap"), 2) + " at α = " + fixed(num(r, "alpha")) +
                       (r["pass"].get<bool>() ? " (pass)" : " (fail)");
    if (r.contains("frostman")) line += "; ball-mass slope " + fixed(num(r["frostman"], "slope"));
    lines.push_back(line + " [regular-measure definition]");
  }
  if (results.contains("energy")) {
    const auto& e = results["energy"];
    const double slope = num(e, "slope");
    const double alpha = num(e, "alpha");
    std::string line = "E(r) slope " + fixed(slope) + (slope >= alpha ? " ≥" : " <") + " α = " + fixed(alpha) +
                       " (trivial bound " + (e["trivial_bound_ok"].get<bool>() ? "ok" : "violated");
    if (e.contains("dz_margin")) line += "; DZ margin " + signed_fixed(num(e, "dz_margin"), 2);
    lines.push_back(line + ") [trivial energy bound, energy-improvement theorem]");
  }
  if (results.contains("solid")) {
    const auto& s = results["solid"];
    const double slope = num(s["fit"], "slope");
    lines.push_back("solid average slope " + fixed(slope) + (s["ok"].get<bool>() ? " ≤" : " >") +
                    " -α + 0.1 = " + fixed(num(s, "bound")) + (s["ok"].get<bool>() ? " (ok)" : " (fail)") +
                    " [solid-average lemma]");
  }
  if (results.contains("spherical")) {
    const auto& s = results["spherical"];
    std::string line = "spherical average (" + s["weight"].get<std::string>() + ") slope " +
                       fixed(num(s, "slope")) + (s["ok"].get<bool>() ? " ≤" : " >") + " -α + 0.1 = " +
                       fixed(num(s, "bound")) + (s["ok"].get<bool>() ? " (ok)" : " (fail)");
    if (s.contains("solid_bound_ok")) {
      line += std::string("; σ_w ≤ 2·solid ") + (s["solid_bound_ok"].get<bool>() ? "at every t" : "violated") +
              " (worst ratio " + fixed(num(s, "solid_bound_worst_ratio")) + ")";
    }
    lines.push_back(line + " [weighted spherical average bound]");
  }
  if (results.contains("stationary")) {
    const auto& s = results["stationary"];
    lines.push_back("stationary-phase residual slope " + fixed(num(s, "residual_slope")) +
                    (s["ok"].get<bool>() ? " ≤ -1.4 (ok)" : " > -1.4 (fail)") + " over " +
                    std::to_string(s["fit_points"].get<std::size_t>()) + " points [stationary-phase expansion]");
  }
  if (results.contains("mattila")) {
    const auto& m = results["mattila"];
    lines.push_back(std::string(m["weighted"].get<bool>() ? "modified " : "") + "Mattila integral to T = " +
                    fixed(num(m, "truncation"), 1) + ": " + fixed(num(m, "value"), 4) + ", integrand slope " +
                    fixed(num(m, "integrand_slope")) +
                    (m["converging"].get<bool>() ? " < -1 (converging)" : " ≥ -1 (no convergence signal)") +
                    " [Mattila integral, diagnostic only]");
  }
  if (results.contains("distance")) {
    const auto& d = results["distance"];
    lines.push_back(std::string(d["weighted"].get<bool>() ? "weighted " : "") + "distance measure: " +
                    std::to_string(d["bins"].get<std::size_t>()) + " bins, mass " + fixed(num(d, "total_mass"), 6) +
                    ", diagonal " + fixed(num(d, "diagonal_mass"), 6));
  }
  if (results.contains("angular")) {
    const auto& a = results["angular"];
    lines.push_back("angular split at γ0 = " + fixed(num(a, "gamma0"), 2) + ": middle ≤ Cauchy-Schwarz bound " +
                    (a["middle_within_bound"].get<bool>() ? "at every t" : "violated") + " [energy-improvement theorem]");
  }
  if (results.contains("thresholds")) {
    const auto& t = results["thresholds"];
    const auto& applicable = t["applicable"];
    auto applies = [&](const std::string& name) {
      for (const auto& a : applicable) {
        if (a.get<std::string>() == name) return true;
      }
      return false;
    };
    lines.push_back("dimension sum " + t["total_dim"].get<std::string>() + " (" + fixed(num(t, "total_dim_value")) +
                    ") vs d²/(2d-1) = " + t["product_threshold"].get<std::string>() + ": margin " +
                    signed_fixed(num(t, "product_margin_value")) + " [product-dimension" +
                    (applies("product-dimension") ? " applies]" : " not applicable]"));
    if (t.contains("imbalance_margin_value")) {
      lines.push_back("imbalance margin " + signed_fixed(num(t, "imbalance_margin_value")) + " [product-imbalance" +
                      (applies("product-imbalance") ? " applies]" : " not applicable]"));
    }
    if (t.contains("regular_margin")) {
      lines.push_back("regular factors: β = " + fixed(num(t, "regular_beta"), 6) + ", δ = " +
                      fixed(num(t, "regular_delta"), 6) + ", margin " + signed_fixed(num(t, "regular_margin"), 6) +
                      " [regular-factor-energy (derived candidate)" +
                      (applies("regular-factor-energy (derived candidate)") ? " applies]" : " not applicable]"));
    }
  }
  return lines;
}

}  // namespace

std::string emit_report(const std::string& directory) {
  const fs::path root(directory);
  if (!fs::is_directory(root)) throw ValidationError("report: '" + directory + "' is not a directory");
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() == kManifestName) manifests.push_back(entry.path());
  }
  if (manifests.empty()) throw ValidationError("report: no manifest found under '" + directory + "'");
  std::sort(manifests.begin(), manifests.end());

  std::map<std::size_t, std::vector<std::string>> groups;
  for (const auto& path : manifests) {
    const std::string rel = fs::relative(path.parent_path(), root).generic_string();
    json m;
    try {
      m = json::parse(read_file(path));
    } catch (const json::parse_error&) {
      throw ValidationError("report: corrupt manifest '" + path.string() + "'");
    }
    for (const char* key : {"d", "files", "kind", "results", "config_sha256", "version"}) {
      if (!m.contains(key)) throw ValidationError("report: manifest '" + path.string() + "' lacks '" + key + "'");
    }
    for (const auto& [name, hash] : m["files"].items()) {
      const fs::path file = path.parent_path() / name;
      if (!fs::exists(file)) throw ValidationError("report: '" + file.string() + "' listed in manifest is missing");
      if (sha256_hex(read_file(file)) != hash.get<std::string>()) {
        throw ValidationError("report: hash mismatch for '" + file.string() + "'");
      }
    }
    auto& group = groups[m["d"].get<std::size_t>()];
    group.push_back("### " + (rel == "." ? std::string(".") : rel) + " (" + m["kind"].get<std::string>() + ")");
    for (auto& line : describe(m["results"])) group.push_back("- " + line);
  }

  std::ostringstream out;
  out << "# Experiment summary\n";
  for (const auto& [d, lines] : groups) {
    out << "\n## d = " << d << "\n\n";
    for (const auto& line : lines) out << line << '\n';
  }
  return out.str();
}

}  // namespace prodist
