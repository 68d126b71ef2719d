#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the fast paths it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "prodist/measures.hpp"

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// Indices in [0, base^level) whose base-`base` digits all lie in `digits`,
// found by scanning every grid index.
inline std::vector<std::int64_t> cantor_indices(int base, const std::vector<int>& digits, int level) {
  std::int64_t n = 1;
  for (int k = 0; k < level; ++k) n *= base;
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t v = i;
    bool ok = true;
    for (int k = 0; k < level; ++k) {
      const int d = static_cast<int>(v % base);
      v /= base;
      if (std::find(digits.begin(), digits.end(), d) == digits.end()) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(i);
  }
  return out;
}

// nu(B(x, r)) by a full scan over atoms, using integer distances.
inline double ball_mass_scan(const prodist::GridMeasure& nu, std::size_t centre, std::int64_t radius_cells) {
  double mass = 0.0;
  for (const auto& a : nu.atoms()) {
    if (std::llabs(a.index - nu.atoms()[centre].index) <= radius_cells) mass += a.weight;
  }
  return mass;
}

// Additive energy by enumerating quadruples of integer indices; `window` is
// the largest admissible |sum gap| in cells.
inline double energy_quadruples(const prodist::GridMeasure& nu, std::int64_t window) {
  const auto atoms = nu.atoms();
  long double total = 0.0L;
  for (const auto& a : atoms)
    for (const auto& b : atoms)
      for (const auto& c : atoms)
        for (const auto& d : atoms) {
          if (std::llabs((a.index + b.index) - (c.index + d.index)) <= window) {
            total += static_cast<long double>(a.weight) * b.weight * c.weight * d.weight;
          }
        }
  return static_cast<double>(total);
}

// Fourth-moment sum of psi(t (u1 - u2 + u3 - u4)) over quadruples.
template <typename Psi>
double smoothed_quadruples(const prodist::GridMeasure& nu, double t, Psi psi) {
  const auto atoms = nu.atoms();
  long double total = 0.0L;
  for (std::size_t a = 0; a < atoms.size(); ++a)
    for (std::size_t b = 0; b < atoms.size(); ++b)
      for (std::size_t c = 0; c < atoms.size(); ++c)
        for (std::size_t d = 0; d < atoms.size(); ++d) {
          const double gap = nu.position(a) - nu.position(b) + nu.position(c) - nu.position(d);
          total += static_cast<long double>(atoms[a].weight) * atoms[b].weight * atoms[c].weight *
                   atoms[d].weight * psi(t * gap);
        }
  return static_cast<double>(total);
}

inline std::complex<double> ft_direct(const prodist::GridMeasure& nu, double xi) {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    s += nu.atoms()[i].weight * std::exp(std::complex<double>(0.0, -2.0 * kPi * nu.position(i) * xi));
  }
  return s;
}

// Direct sum over all atom pairs of the planar product.
inline std::complex<double> product_ft_direct(const prodist::GridMeasure& a, const prodist::GridMeasure& b,
                                              double xi1, double xi2) {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double phase = -2.0 * kPi * (a.position(i) * xi1 + b.position(j) * xi2);
      s += a.atoms()[i].weight * b.atoms()[j].weight * std::exp(std::complex<double>(0.0, phase));
    }
  return s;
}

// Random measure on a base^level grid with `atoms` distinct atoms (clamped to
// the grid size) and random positive weights.
inline prodist::GridMeasure random_measure(std::mt19937_64& rng, int base, int level, std::size_t atoms) {
  std::int64_t n = 1;
  for (int k = 0; k < level; ++k) n *= base;
  atoms = std::min<std::size_t>(atoms, static_cast<std::size_t>(n));
  std::vector<std::int64_t> all(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(atoms);
  std::sort(all.begin(), all.end());
  std::uniform_real_distribution<double> w(0.05, 1.0);
  std::vector<prodist::Atom> out;
  for (auto i : all) out.push_back({i, w(rng)});
  return prodist::GridMeasure::normalized(base, level, std::move(out));
}

}  // namespace oracle
