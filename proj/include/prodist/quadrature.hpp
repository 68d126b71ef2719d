#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "prodist/error.hpp"
#include "prodist/numeric.hpp"

namespace prodist {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule computed by Newton iteration on P_n.
GaussRule gauss_legendre(std::size_t n);
// Cached 16-point rule used by the composite integrators.
const GaussRule& gauss16();

template <typename T>
struct QuadratureResult {
  T value{};
  std::size_t nodes = 0;
  bool converged = false;
};

// Composite 16-point Gauss-Legendre over [a,b] with `panels` equal panels.
template <typename Fn>
auto composite_gauss(Fn&& fn, double a, double b, std::size_t panels) {
  using T = decltype(fn(0.0));
  const GaussRule& rule = gauss16();
  const double h = (b - a) / static_cast<double>(panels);
  T total{};
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double mid = lo + 0.5 * h;
    T panel{};
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      panel += rule.weights[k] * fn(mid + 0.5 * h * rule.nodes[k]);
    }
    total += panel * (0.5 * h);
  }
  return total;
}

// Doubles the panel count until two successive estimates differ by less
// than rel_tol relative (or abs_tol absolute). Throws ConvergenceError past
// max_panels.
template <typename Fn>
auto gauss_doubling(Fn&& fn, double a, double b, std::size_t initial_panels, double rel_tol,
                    std::size_t max_panels = std::size_t{1} << 18, double abs_tol = 0.0) {
  using T = decltype(fn(0.0));
  QuadratureResult<T> out;
  std::size_t panels = std::max<std::size_t>(1, initial_panels);
  T prev = composite_gauss(fn, a, b, panels);
  while (panels < max_panels) {
    panels *= 2;
    const T next = composite_gauss(fn, a, b, panels);
    const double diff = std::abs(next - prev);
    prev = next;
    if (diff <= rel_tol * std::abs(next) || diff <= abs_tol || diff <= 1e-300) {
      out.value = next;
      out.nodes = panels * gauss16().nodes.size();
      out.converged = true;
      return out;
    }
  }
  throw ConvergenceError("gauss_doubling: no convergence within " + std::to_string(max_panels) +
                         " panels");
}

// Trapezoid rule for a 2*pi-periodic integrand over [0, 2*pi), doubling the
// node count (reusing previous nodes) until successive values agree to rel_tol.
template <typename Fn>
auto periodic_trapezoid_doubling(Fn&& fn, std::size_t initial_nodes, double rel_tol,
                                 std::size_t max_nodes = std::size_t{1} << 22) {
  using T = decltype(fn(0.0));
  QuadratureResult<T> out;
  std::size_t n = std::max<std::size_t>(4, initial_nodes);
  T sum{};
  for (std::size_t k = 0; k < n; ++k) sum += fn(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
  T prev = sum * (2.0 * kPi / static_cast<double>(n));
  while (n < max_nodes) {
    T added{};
    for (std::size_t k = 0; k < n; ++k) {
      added += fn(2.0 * kPi * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
    }
    sum += added;
    n *= 2;
    const T next = sum * (2.0 * kPi / static_cast<double>(n));
    const double diff = std::abs(next - prev);
    prev = next;
    if (diff <= rel_tol * std::abs(next) || diff <= 1e-300) {
      out.value = next;
      out.nodes = n;
      out.converged = true;
      return out;
    }
  }
  throw ConvergenceError("periodic_trapezoid_doubling: no convergence within " +
                         std::to_string(max_nodes) + " nodes");
}

}  // namespace prodist
