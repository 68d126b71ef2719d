#pragma once

// Discretized Cantor-type measures on [0,1), their Cartesian products,
// and Frostman / Ahlfors-David regularity audits.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prodist/fit.hpp"

namespace prodist {

// Digit-restricted Cantor set: numbers in [0,1) whose first `level` base-`base`
// digits all lie in `digits`.
struct CantorSpec {
  int base = 3;
  std::vector<int> digits{0, 2};
  int level = 1;

  // Throws ValidationError naming the offending field.
  void validate() const;
  // log|digits| / log base
  double nominal_dimension() const;
};

struct Atom {
  std::int64_t index = 0;
  double weight = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

// Probability measure on the grid {k * base^-level : 0 <= k < base^level}.
// Immutable once created.
class GridMeasure {
 public:
  // Validates: base >= 2, level >= 0, indices strictly increasing and in range,
  // weights finite and nonnegative, total mass 1 within 1e-12.
  static GridMeasure create(int base, int level, std::vector<Atom> atoms,
                            std::optional<double> dimension_hint = std::nullopt);
  // Same as create() but rescales weights to unit mass first.
  static GridMeasure normalized(int base, int level, std::vector<Atom> atoms,
                                std::optional<double> dimension_hint = std::nullopt);
  // Unit point mass at grid index `index`.
  static GridMeasure point_mass(int base, int level, std::int64_t index = 0);

  int base() const { return base_; }
  int level() const { return level_; }
  // base^level
  std::int64_t grid_size() const { return grid_size_; }
  double resolution() const { return 1.0 / static_cast<double>(grid_size_); }
  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double position(std::size_t i) const {
    return static_cast<double>(atoms_[i].index) / static_cast<double>(grid_size_);
  }
  std::optional<double> dimension_hint() const { return dimension_hint_; }
  double total_mass() const;

  friend bool operator==(const GridMeasure&, const GridMeasure&) = default;

 private:
  GridMeasure() = default;

  int base_ = 2;
  int level_ = 0;
  std::int64_t grid_size_ = 1;
  std::vector<Atom> atoms_;
  std::optional<double> dimension_hint_;
};

// nu_1 x ... x nu_d with declared per-factor dimensions.
class ProductMeasure {
 public:
  std::span<const GridMeasure> factors() const { return factors_; }
  const GridMeasure& factor(std::size_t j) const { return factors_.at(j); }
  std::span<const double> dims() const { return dims_; }
  double total_dim() const { return total_dim_; }
  std::size_t dimension() const { return factors_.size(); }
  // Smallest grid resolution among the factors.
  double min_resolution() const;
  // Number of atoms of the product (product of factor sizes).
  std::size_t atom_count() const;

 private:
  friend ProductMeasure build_product(std::vector<GridMeasure>, std::vector<double>);
  ProductMeasure() = default;

  std::vector<GridMeasure> factors_;
  std::vector<double> dims_;
  double total_dim_ = 0.0;
};

GridMeasure build_cantor(const CantorSpec& spec);

// Requires >= 2 factors, one dimension per factor, each in [0,1].
ProductMeasure build_product(std::vector<GridMeasure> factors, std::vector<double> dims);

struct ScaleRatios {
  double r = 0.0;
  double min_ratio = 0.0;  // min over atom centers of nu(B(x,r)) / r^alpha
  double max_ratio = 0.0;
};

struct RegularityReport {
  double alpha = 0.0;
  std::vector<ScaleRatios> scales;
  double c_lower = 0.0;
  double c_upper = 0.0;
  double c_nu = 0.0;  // max(c_upper, 1/c_lower)
  double cap = 0.0;
  bool pass = false;
};

// Mass of the closed ball [x - r, x + r] around atom i.
double ball_mass(const GridMeasure& nu, std::size_t atom, double r);
// max over atoms of ball_mass(nu, atom, r)
double max_ball_mass(const GridMeasure& nu, double r);

// Scans every atom center at every scale. Each scale must satisfy
// resolution <= r <= 1; alpha must lie in (0,1].
RegularityReport check_regularity(const GridMeasure& nu, double alpha,
                                  std::span<const double> scales, double cap);

// Log-log slope of max ball mass against r; approximates the local dimension.
LoglogFit frostman_fit(const GridMeasure& nu, std::span<const double> scales);

// Line-oriented text format:
//   # prodist grid-measure v1
//   base=<int>
//   level=<int>
//   [dimension_hint=<real>]
//   index,weight
//   <index>,<weight>   (one line per atom)
// Reals use the shortest round-trip representation, so write/read is bit-exact.
void write_measure(std::ostream& out, const GridMeasure& nu);
GridMeasure read_measure(std::istream& in);
std::string to_text(const GridMeasure& nu);
GridMeasure from_text(const std::string& text);

}  // namespace prodist
