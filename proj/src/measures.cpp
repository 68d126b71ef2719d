#include "prodist/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "prodist/error.hpp"
#include "prodist/numeric.hpp"

namespace prodist {

namespace {

constexpr std::int64_t kMaxGridSize = std::int64_t{1} << 40;
constexpr std::size_t kMaxCantorAtoms = std::size_t{1} << 24;

std::int64_t checked_power(int base, int level) {
  std::int64_t n = 1;
  for (int k = 0; k < level; ++k) {
    if (n > kMaxGridSize / base) {
      throw BudgetError("grid size base^level exceeds 2^40 (base=" + std::to_string(base) +
                        ", level=" + std::to_string(level) + ")");
    }
    n *= base;
  }
  return n;
}

void validate_grid(int base, int level) {
  if (base < 2) throw ValidationError("base: must be >= 2, got " + std::to_string(base));
  if (level < 0) throw ValidationError("level: must be >= 0, got " + std::to_string(level));
}

// Prefix sums of atom weights, prefix[k] = sum of the first k weights.
std::vector<double> weight_prefix(const GridMeasure& nu) {
  std::vector<double> prefix(nu.size() + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    acc.add(nu.atoms()[i].weight);
    prefix[i + 1] = acc.value();
  }
  return prefix;
}

// Largest integer index gap g with g * delta <= r (closed, ties included).
std::int64_t closed_radius_in_cells(const GridMeasure& nu, double r) {
  const double cells = r * static_cast<double>(nu.grid_size()) * (1.0 + kTieTolerance);
  if (cells >= static_cast<double>(kMaxGridSize)) return kMaxGridSize;
  return static_cast<std::int64_t>(std::floor(cells));
}

double window_mass(const GridMeasure& nu, const std::vector<double>& prefix, std::size_t atom,
                   std::int64_t radius) {
  const auto atoms = nu.atoms();
  const std::int64_t centre = atoms[atom].index;
  const auto lo = std::lower_bound(atoms.begin(), atoms.end(), centre - radius,
                                   [](const Atom& a, std::int64_t v) { return a.index < v; });
  const auto hi = std::upper_bound(atoms.begin(), atoms.end(), centre + radius,
                                   [](std::int64_t v, const Atom& a) { return v < a.index; });
  return prefix[static_cast<std::size_t>(hi - atoms.begin())] -
         prefix[static_cast<std::size_t>(lo - atoms.begin())];
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw ValidationError("measure file: cannot parse " + what + " from '" + text + "'");
  }
  return value;
}

}  // namespace

void CantorSpec::validate() const {
  if (base < 2) throw ValidationError("base: must be >= 2, got " + std::to_string(base));
  if (level < 0) throw ValidationError("level: must be >= 0, got " + std::to_string(level));
  if (digits.empty()) throw ValidationError("digits: must be nonempty");
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= base) {
      throw ValidationError("digits: digit " + std::to_string(digits[i]) + " outside [0, " +
                            std::to_string(base - 1) + "]");
    }
    if (i > 0 && digits[i] <= digits[i - 1]) {
      throw ValidationError("digits: must be strictly increasing");
    }
  }
}

double CantorSpec::nominal_dimension() const {
  return std::log(static_cast<double>(digits.size())) / std::log(static_cast<double>(base));
}

GridMeasure GridMeasure::create(int base, int level, std::vector<Atom> atoms,
                                std::optional<double> dimension_hint) {
  validate_grid(base, level);
  GridMeasure m;
  m.base_ = base;
  m.level_ = level;
  m.grid_size_ = checked_power(base, level);
  if (atoms.empty()) throw ValidationError("atoms: measure must have at least one atom");
  CompensatedSum total;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    if (a.index < 0 || a.index >= m.grid_size_) {
      throw ValidationError("atoms: index " + std::to_string(a.index) + " outside [0, " +
                            std::to_string(m.grid_size_) + ")");
    }
    if (i > 0 && a.index <= atoms[i - 1].index) {
      throw ValidationError("atoms: indices must be strictly increasing");
    }
    if (!std::isfinite(a.weight) || a.weight < 0.0) {
      throw ValidationError("atoms: weights must be finite and nonnegative");
    }
    total.add(a.weight);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw ValidationError("atoms: total mass " + format_double(total.value()) +
                          " differs from 1 by more than 1e-12");
  }
  if (dimension_hint && !(*dimension_hint >= 0.0 && *dimension_hint <= 1.0)) {
    throw ValidationError("dimension_hint: must lie in [0,1]");
  }
  m.atoms_ = std::move(atoms);
  m.dimension_hint_ = dimension_hint;
  return m;
}

GridMeasure GridMeasure::normalized(int base, int level, std::vector<Atom> atoms,
                                    std::optional<double> dimension_hint) {
  CompensatedSum total;
  for (const Atom& a : atoms) total.add(a.weight);
  const double mass = total.value();
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw ValidationError("atoms: total mass must be positive and finite to normalize");
  }
  for (Atom& a : atoms) a.weight /= mass;
  return create(base, level, std::move(atoms), dimension_hint);
}

GridMeasure GridMeasure::point_mass(int base, int level, std::int64_t index) {
  return create(base, level, {Atom{index, 1.0}}, 0.0);
}

double GridMeasure::total_mass() const {
  CompensatedSum acc;
  for (const Atom& a : atoms_) acc.add(a.weight);
  return acc.value();
}

double ProductMeasure::min_resolution() const {
  double best = 1.0;
  for (const auto& f : factors_) best = std::min(best, f.resolution());
  return best;
}

std::size_t ProductMeasure::atom_count() const {
  std::size_t n = 1;
  for (const auto& f : factors_) n *= f.size();
  return n;
}

GridMeasure build_cantor(const CantorSpec& spec) {
  spec.validate();
  const auto per_level = spec.digits.size();
  std::size_t count = 1;
  for (int k = 0; k < spec.level; ++k) {
    if (count > kMaxCantorAtoms / per_level) {
      throw BudgetError("build_cantor: more than 2^24 atoms; lower the level");
    }
    count *= per_level;
  }
  checked_power(spec.base, spec.level);

  // Digits are increasing and expansions are generated most significant digit
  // first, so the indices come out sorted.
  std::vector<std::int64_t> indices{0};
  for (int k = 0; k < spec.level; ++k) {
    std::vector<std::int64_t> next;
    next.reserve(indices.size() * per_level);
    for (std::int64_t prefix : indices) {
      for (int d : spec.digits) next.push_back(prefix * spec.base + d);
    }
    indices = std::move(next);
  }
  const double weight = 1.0 / static_cast<double>(count);
  std::vector<Atom> atoms;
  atoms.reserve(indices.size());
  for (std::int64_t idx : indices) atoms.push_back({idx, weight});
  return GridMeasure::create(spec.base, spec.level, std::move(atoms), spec.nominal_dimension());
}

ProductMeasure build_product(std::vector<GridMeasure> factors, std::vector<double> dims) {
  if (factors.size() < 2) {
    throw ValidationError("factors: a product needs at least 2 factors, got " +
                          std::to_string(factors.size()));
  }
  if (dims.size() != factors.size()) {
    throw ValidationError("dims: expected " + std::to_string(factors.size()) + " entries, got " +
                          std::to_string(dims.size()));
  }
  double total = 0.0;
  for (double s : dims) {
    if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("dims: every entry must lie in [0,1]");
    total += s;
  }
  ProductMeasure mu;
  mu.factors_ = std::move(factors);
  mu.dims_ = std::move(dims);
  mu.total_dim_ = total;
  return mu;
}

double ball_mass(const GridMeasure& nu, std::size_t atom, double r) {
  if (atom >= nu.size()) throw ValidationError("ball_mass: atom out of range");
  if (!(r >= 0.0)) throw ValidationError("ball_mass: radius must be nonnegative");
  const auto prefix = weight_prefix(nu);
  return window_mass(nu, prefix, atom, closed_radius_in_cells(nu, r));
}

double max_ball_mass(const GridMeasure& nu, double r) {
  if (!(r >= 0.0)) throw ValidationError("max_ball_mass: radius must be nonnegative");
  const auto prefix = weight_prefix(nu);
  const auto radius = closed_radius_in_cells(nu, r);
  double best = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    best = std::max(best, window_mass(nu, prefix, i, radius));
  }
  return best;
}

RegularityReport check_regularity(const GridMeasure& nu, double alpha,
                                  std::span<const double> scales, double cap) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha: must lie in (0,1], got " + format_double(alpha));
  }
  if (scales.empty()) throw ValidationError("scales: need at least one scale");
  const double delta = nu.resolution();
  for (double r : scales) {
    if (!(r >= delta * (1.0 - kTieTolerance))) {
      throw ValidationError("scales: r = " + format_double(r) + " is below the grid resolution " +
                            format_double(delta));
    }
    if (!(r <= 1.0)) throw ValidationError("scales: r = " + format_double(r) + " exceeds 1");
  }

  const auto prefix = weight_prefix(nu);
  RegularityReport report;
  report.alpha = alpha;
  report.cap = cap;
  report.c_lower = std::numeric_limits<double>::infinity();
  report.c_upper = 0.0;
  for (double r : scales) {
    const auto radius = closed_radius_in_cells(nu, r);
    const double norm = std::pow(r, alpha);
    ScaleRatios row{r, std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < nu.size(); ++i) {
      if (nu.atoms()[i].weight <= 0.0) continue;  // not in the support
      const double ratio = window_mass(nu, prefix, i, radius) / norm;
      row.min_ratio = std::min(row.min_ratio, ratio);
      row.max_ratio = std::max(row.max_ratio, ratio);
    }
    report.c_lower = std::min(report.c_lower, row.min_ratio);
    report.c_upper = std::max(report.c_upper, row.max_ratio);
    report.scales.push_back(row);
  }
  report.c_nu = std::max({report.c_upper, 1.0 / report.c_lower, 1.0});
  report.pass = report.c_nu <= cap;
  return report;
}

LoglogFit frostman_fit(const GridMeasure& nu, std::span<const double> scales) {
  if (scales.size() < 3) throw ValidationError("frostman_fit: need at least 3 scales");
  std::vector<std::pair<double, double>> points;
  points.reserve(scales.size());
  for (double r : scales) {
    if (!(r > 0.0)) throw ValidationError("frostman_fit: scales must be positive");
    points.emplace_back(r, max_ball_mass(nu, r));
  }
  return loglog_fit(points);
}

void write_measure(std::ostream& out, const GridMeasure& nu) {
  out << "# prodist grid-measure v1\n";
  out << "base=" << nu.base() << "\n";
  out << "level=" << nu.level() << "\n";
  if (nu.dimension_hint()) out << "dimension_hint=" << format_double(*nu.dimension_hint()) << "\n";
  out << "index,weight\n";
  for (const Atom& a : nu.atoms()) out << a.index << "," << format_double(a.weight) << "\n";
}

GridMeasure read_measure(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "# prodist grid-measure v1") {
    throw ValidationError("measure file: missing '# prodist grid-measure v1' header");
  }
  std::optional<int> base;
  std::optional<int> level;
  std::optional<double> hint;
  bool in_body = false;
  std::vector<Atom> atoms;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (!in_body) {
      if (line == "index,weight") {
        in_body = true;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ValidationError("measure file: bad header line '" + line + "'");
      const std::string key = line.substr(0, eq);
      const std::string value = line.substr(eq + 1);
      if (key == "base") {
        base = parse_number<int>(value, "base");
      } else if (key == "level") {
        level = parse_number<int>(value, "level");
      } else if (key == "dimension_hint") {
        hint = parse_number<double>(value, "dimension_hint");
      } else {
        throw ValidationError("measure file: unknown header key '" + key + "'");
      }
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("measure file: bad atom line '" + line + "'");
    atoms.push_back({parse_number<std::int64_t>(line.substr(0, comma), "index"),
                     parse_number<double>(line.substr(comma + 1), "weight")});
  }
  if (!base) throw ValidationError("measure file: missing base");
  if (!level) throw ValidationError("measure file: missing level");
  if (!in_body) throw ValidationError("measure file: missing 'index,weight' column header");
  return GridMeasure::create(*base, *level, std::move(atoms), hint);
}

std::string to_text(const GridMeasure& nu) {
  std::ostringstream out;
  write_measure(out, nu);
  return out.str();
}

GridMeasure from_text(const std::string& text) {
  std::istringstream in(text);
  return read_measure(in);
}

}  // namespace prodist
