#pragma once

// Fourier transforms of grid and product measures, spherical and solid
// averages, the stationary-phase check for the |sin theta|-weighted circle
// integral, and the small-angle / Cauchy-Schwarz angular decomposition.
//
// Transform convention: nu^(xi) = sum_j w_j exp(-2 pi i x_j xi).

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "prodist/cutoff.hpp"
#include "prodist/fit.hpp"
#include "prodist/measures.hpp"

namespace prodist {

std::complex<double> measure_ft(const GridMeasure& nu, double xi);
// Product of factor transforms; xi.size() must equal the number of factors.
std::complex<double> product_ft(const ProductMeasure& mu, std::span<const double> xi);

// |sin theta| is |omega_d| (distance of omega from the hyperplane x_d = 0);
// |cos theta| is |omega_1|. In the plane these are the usual angle weights.
enum class SphereWeight { none, sin_theta, cos_theta };

enum class QuadratureKind { uniform_angle, monte_carlo_sphere };

struct QuadratureSpec {
  // uniform_angle is used for d = 2, monte_carlo_sphere for d >= 3.
  QuadratureKind kind = QuadratureKind::uniform_angle;
  // Minimum starting node count (d = 2) or sample count (d >= 3).
  std::size_t node_count = 64;
  std::uint64_t seed = 0;
  double rel_tol = 1e-6;
};

// Default spec for a product of the given dimension.
QuadratureSpec default_quadrature(std::size_t dimension, std::uint64_t seed = 0);

// Largest frequency for which a grid measure stands in for its fractal limit:
// 0.1 / (smallest factor resolution).
double validity_cap(const ProductMeasure& mu);

struct SphericalAverage {
  double t = 0.0;
  double value = 0.0;
  double stderr_value = 0.0;  // Monte Carlo standard error, 0 for d = 2
  std::size_t nodes = 0;
};

// Integral over S^{d-1} (arclength / surface measure) of |mu^(t omega)|^2 w(omega).
// Throws ValidationError when t < 0 or t exceeds validity_cap(mu).
SphericalAverage spherical_average(const ProductMeasure& mu, double t, SphereWeight weight,
                                   const QuadratureSpec& quadrature);

struct SphericalAverageSeries {
  std::vector<SphericalAverage> points;
  SphereWeight weight = SphereWeight::none;
  QuadratureSpec quadrature;
  double fitted_decay = 0.0;
  double stderr_decay = 0.0;
};

SphericalAverageSeries spherical_average_series(const ProductMeasure& mu,
                                                std::span<const double> t_values,
                                                SphereWeight weight,
                                                const QuadratureSpec& quadrature, int workers = 1);

// Surface measure of S^{d-1}.
double sphere_area(std::size_t dimension);

struct SolidAverage {
  double value = 0.0;
  std::size_t nodes = 0;
};

// Integral of |nu^(t u)|^2 over u in [a, b]; t >= 1, a < b.
SolidAverage solid_average(const GridMeasure& nu, double t, double a, double b,
                           double rel_tol = 1e-6);

struct StationaryPhaseRow {
  double t = 0.0;
  std::complex<double> exact;  // integral over [0, 2 pi) of e^{2 pi i t g.omega} |sin theta|
  double main = 0.0;           // 2 (t|g|)^(-1/2) cos(2 pi (t|g| - 1/8)) |sin theta_g|
  // RMS of |exact - main| over kPhaseOffsets equally spaced shifts of t|g|
  // across one period; removes the oscillating factor of the next-order term.
  double resid = 0.0;
  double main_envelope = 0.0;  // 2 (t|g|)^(-1/2) |sin theta_g|
};

struct StationaryPhaseReport {
  std::array<double, 2> gap{};
  std::vector<StationaryPhaseRow> rows;
  // Log-log slope of resid against t over rows with t|g| >= 10.
  double residual_slope = 0.0;
  double residual_slope_stderr = 0.0;
  std::size_t fit_points = 0;
};

inline constexpr int kPhaseOffsets = 4;

// Circle integral with |sin theta| weight against its two-point stationary
// phase expansion. Needs |gap| > 0 and at least 3 rows with t|gap| >= 10.
StationaryPhaseReport stationary_phase_check(std::array<double, 2> gap,
                                             std::span<const double> t_values);
// The oscillatory integral alone, to relative tolerance rel_tol.
std::complex<double> weighted_circle_integral(std::array<double, 2> gap, double t,
                                              double rel_tol = 1e-10);

struct AngularDecomposition {
  double t = 0.0;
  double gamma0 = 0.0;
  double theta_cut = 0.0;     // t^-gamma0
  double near_zero = 0.0;     // over [0, theta_cut]
  double near_half_pi = 0.0;  // over [pi/2 - theta_cut, pi/2]
  double middle = 0.0;        // over [theta_cut, pi/2 - theta_cut], 0 if empty
  double energy_a = 0.0;      // smoothed fourth moment of the first factor ("I")
  double energy_b = 0.0;      // same for the second factor ("II")
  double cs_constant = 0.0;   // C in cs_bound
  double cs_bound = 0.0;      // C t^gamma0 sqrt(I) sqrt(II)
};

// Splits the quarter circle integral of |nu_A^(t cos)|^2 |nu_B^(t sin)|^2.
// The Cauchy-Schwarz constant is C = (pi/2) s^2 / (s - 1) for cutoff scale s,
// which requires s > 1 (the cutoff transform must stay positive on [0,1]).
AngularDecomposition angular_decomposition(const ProductMeasure& mu, double t, double gamma0,
                                           const CutoffFunction& cutoff);

}  // namespace prodist
