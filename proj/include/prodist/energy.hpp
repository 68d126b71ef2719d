#pragma once

// Additive energy at scale r of a grid measure,
//   E(r) = nu^4 {(u1,u2,u3,u4) : |(u1+u2) - (u3+u4)| < r},
// its decay profile, and the Fejer-smoothed fourth moment.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "prodist/cutoff.hpp"
#include "prodist/measures.hpp"

namespace prodist {

// q = nu * nu on the integer sum grid [0, 2 * base^level - 1).
struct SumsetDistribution {
  int base = 2;
  int level = 0;
  std::int64_t grid_size = 1;
  std::vector<Atom> entries;  // sorted by sum index, zero entries omitted

  double resolution() const { return 1.0 / static_cast<double>(grid_size); }
  // (largest - smallest sum index) * resolution
  double diameter() const;
  double total_mass() const;
};

enum class EnergyAlgorithm { bruteforce, autocorrelation };

// Atom count above which the O(N^4) enumeration refuses to run.
inline constexpr std::size_t kBruteforceAtomLimit = 200;

SumsetDistribution sumset_autocorrelation(const GridMeasure& nu);

// Throws ValidationError when r <= 0, BudgetError when bruteforce is asked
// for more than kBruteforceAtomLimit atoms.
double additive_energy(const GridMeasure& nu, double r, EnergyAlgorithm algorithm);
// Windowed prefix-sum evaluation on a precomputed sumset distribution.
double additive_energy(const SumsetDistribution& q, double r);

struct EnergySample {
  double r = 0.0;
  double energy = 0.0;
};

struct EnergyProfile {
  std::vector<EnergySample> samples;
  double fitted_exponent = 0.0;
  double stderr_exponent = 0.0;
  double alpha_ref = 0.0;
};

// Every r must be >= the grid resolution; at least 3 scales.
EnergyProfile energy_profile(const GridMeasure& nu, std::span<const double> r_values, double alpha,
                             int workers = 1);

// Dyadic scales from 4 * resolution up to the sumset diameter.
std::vector<double> default_energy_scales(const GridMeasure& nu);

struct SmoothedEnergy {
  // sum over quadruples of psi(t (u1 - u2 + u3 - u4))
  double space_side = 0.0;
  // integral of |nu^(t u)|^4 psi^(u) du by quadrature
  double fourier_side = 0.0;
  std::size_t quadrature_nodes = 0;
};

// t >= 1.
SmoothedEnergy smoothed_energy(const GridMeasure& nu, double t, const CutoffFunction& cutoff);
// Space side only, reusing a sumset distribution.
double smoothed_energy_space(const SumsetDistribution& q, double t, const CutoffFunction& cutoff);

// Exponent improvement beta = alpha * exp(-exp(K (1 + log C)^(1/2) (1 - alpha)^(-1/2)))
// over the trivial energy bound for regular sets.
struct DZParams {
  double alpha = 0.0;
  double c_nu = 1.0;
  double k = 1.0;
  double beta = 0.0;
  // Constant of the energy bound; not known in closed form, never computed.
  std::optional<double> c_tilde;
};

// alpha in (0,1), c_nu >= 1, k > 0.
DZParams dz_beta(double alpha, double c_nu, double k = 1.0);

}  // namespace prodist
