#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "prodist/error.hpp"
#include "prodist/fit.hpp"
#include "prodist/fourier.hpp"
#include "prodist/measures.hpp"

using namespace prodist;

namespace {

const double kAlpha = std::log(2.0) / std::log(3.0);

ProductMeasure pair(const GridMeasure& a, const GridMeasure& b) {
  return build_product({a, b}, {a.dimension_hint().value_or(0.0), b.dimension_hint().value_or(0.0)});
}

ProductMeasure point_pair() {
  const auto p = GridMeasure::point_mass(2, 10, 0);
  return build_product({p, p}, {0.0, 0.0});
}

// Dense equally spaced rule on the circle; exact for the band-limited
// integrands used here once the node count exceeds the bandwidth.
double dense_circle(const ProductMeasure& mu, double t, SphereWeight weight, std::size_t nodes) {
  long double sum = 0.0L;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double th = 2.0 * oracle::kPi * static_cast<double>(k) / static_cast<double>(nodes);
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double xi[2] = {t * c, t * s};
    const double w = weight == SphereWeight::none ? 1.0
                     : weight == SphereWeight::sin_theta ? std::abs(s)
                                                         : std::abs(c);
    sum += std::norm(product_ft(mu, xi)) * w;
  }
  return static_cast<double>(sum) * 2.0 * oracle::kPi / static_cast<double>(nodes);
}

}  // namespace

TEST_CASE("measure_ft examples") {
  const auto atom = GridMeasure::point_mass(2, 4, 0);
  for (double xi : {0.0, 0.3, 17.0, -5.5}) CHECK(std::abs(measure_ft(atom, xi) - 1.0) < 1e-15);

  const auto half = GridMeasure::create(2, 1, {{0, 0.5}, {1, 0.5}});
  CHECK(std::abs(measure_ft(half, 1.0)) < 1e-15);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto nu = oracle::random_measure(rng, 3, 5, 1 + rng() % 30);
    CHECK(std::abs(measure_ft(nu, 0.0) - 1.0) < 1e-14);
  }
}

TEST_CASE("measure_ft matches the direct sum and stays bounded") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> freq(-500.0, 500.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto nu = oracle::random_measure(rng, 2 + static_cast<int>(rng() % 4), 5, 1 + rng() % 40);
    for (int k = 0; k < 10; ++k) {
      const double xi = freq(rng);
      const auto got = measure_ft(nu, xi);
      CHECK(std::abs(got - oracle::ft_direct(nu, xi)) < 1e-10);
      CHECK(std::abs(got) <= 1.0 + 1e-14);
    }
  }
}

TEST_CASE("Parseval over one period of the grid") {
  // positions k/N make nu^ N-periodic; (1/N) int_0^N |nu^|^2 = sum w^2.
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto nu = oracle::random_measure(rng, 2, 5, 1 + rng() % 32);
    const std::int64_t n = nu.grid_size();
    const std::int64_t samples = 4 * n;
    long double acc = 0.0L;
    for (std::int64_t k = 0; k < samples; ++k) {
      acc += std::norm(measure_ft(nu, static_cast<double>(k) * n / samples));
    }
    double sq = 0.0;
    for (const auto& a : nu.atoms()) sq += a.weight * a.weight;
    CHECK(static_cast<double>(acc / samples) == doctest::Approx(sq).epsilon(1e-12));
  }
}

TEST_CASE("product_ft examples and tensor factorization") {
  const auto mu = point_pair();
  const double xi[2] = {3.7, -11.0};
  CHECK(std::abs(product_ft(mu, xi) - 1.0) < 1e-15);

  const auto half = GridMeasure::create(2, 1, {{0, 0.5}, {1, 0.5}});
  std::mt19937_64 rng(41);
  const auto b = oracle::random_measure(rng, 3, 3, 5);
  const double axis[2] = {1.0, 0.0};
  CHECK(std::abs(product_ft(pair(half, b), axis)) < 1e-15);

  const double wrong[3] = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(product_ft(pair(half, b), wrong), ValidationError);

  std::uniform_real_distribution<double> freq(-50.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto fa = oracle::random_measure(rng, 2 + static_cast<int>(rng() % 3), 4, 4);
    const auto fb = oracle::random_measure(rng, 2 + static_cast<int>(rng() % 3), 4, 4);
    const double x[2] = {freq(rng), freq(rng)};
    const auto direct = oracle::product_ft_direct(fa, fb, x[0], x[1]);
    CHECK(std::abs(product_ft(pair(fa, fb), x) - direct) < 1e-12);
  }
  const auto fa = oracle::random_measure(rng, 2, 4, 4);
  const auto fb = oracle::random_measure(rng, 2, 4, 4);
  const double fixed[2] = {0.7, 1.3};
  CHECK(std::abs(product_ft(pair(fa, fb), fixed) - oracle::product_ft_direct(fa, fb, 0.7, 1.3)) < 1e-12);
}

TEST_CASE("spherical averages of point masses") {
  const auto mu = point_pair();
  const auto q = default_quadrature(2);
  for (double t : {0.0, 1.0, 10.0, 50.0}) {
    CHECK(spherical_average(mu, t, SphereWeight::none, q).value == doctest::Approx(2.0 * oracle::kPi));
    CHECK(spherical_average(mu, t, SphereWeight::sin_theta, q).value == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(spherical_average(mu, t, SphereWeight::cos_theta, q).value == doctest::Approx(4.0).epsilon(1e-9));
  }
  const auto p = GridMeasure::point_mass(2, 10, 0);
  const auto mu3 = build_product({p, p, p}, {0.0, 0.0, 0.0});
  const auto q3 = default_quadrature(3, 5);
  CHECK(q3.kind == QuadratureKind::monte_carlo_sphere);
  const auto s3 = spherical_average(mu3, 4.0, SphereWeight::none, q3);
  CHECK(s3.value == doctest::Approx(4.0 * oracle::kPi).epsilon(1e-12));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * oracle::kPi));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * oracle::kPi));
  // |omega_3| averages to 1/2 on S^2, so the weighted area is 2 pi.
  const auto w3 = spherical_average(mu3, 4.0, SphereWeight::sin_theta, q3);
  CHECK(std::abs(w3.value - 2.0 * oracle::kPi) <= 4.0 * w3.stderr_value + 1e-12);
}

TEST_CASE("spherical average matches a dense reference") {
  const auto nu = build_cantor({3, {0, 2}, 6});
  const auto mu = pair(nu, nu);
  const double t = 27.0;
  for (auto w : {SphereWeight::none, SphereWeight::sin_theta}) {
    const double got = spherical_average(mu, t, w, default_quadrature(2)).value;
    // The weighted integrand has kinks, so the dense rule is the slower one:
    // compare it with the self-converged value of two dense rules.
    const double ref = dense_circle(mu, t, w, std::size_t{1} << 16);
    const double ref2 = dense_circle(mu, t, w, std::size_t{1} << 17);
    CHECK(std::abs(ref - ref2) <= 1e-7 * ref);
    CHECK(got == doctest::Approx(ref2).epsilon(1e-6));
  }
}

TEST_CASE("spherical average errors") {
  const auto nu = build_cantor({3, {0, 2}, 4});
  const auto mu = pair(nu, nu);
  const double cap = validity_cap(mu);
  CHECK(cap == doctest::Approx(8.1));
  const auto q = default_quadrature(2);
  try {
    spherical_average(mu, cap * 2.0, SphereWeight::none, q);
    FAIL("expected refusal");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("8.1") != std::string::npos);
  }
  CHECK_THROWS_AS(spherical_average(mu, -1.0, SphereWeight::none, q), ValidationError);
  QuadratureSpec mc{QuadratureKind::uniform_angle, 64, 0, 1e-6};
  const auto mu3 = build_product({nu, nu, nu}, {0.5, 0.5, 0.5});
  CHECK_THROWS_AS(spherical_average(mu3, 1.0, SphereWeight::none, mc), ValidationError);
}

TEST_CASE("cos and sin weights swap with the factors") {
  std::mt19937_64 rng(55);
  const auto q = default_quadrature(2);
  for (int trial = 0; trial < 6; ++trial) {
    const auto a = oracle::random_measure(rng, 3, 4, 3 + rng() % 8);
    const auto b = oracle::random_measure(rng, 3, 4, 3 + rng() % 8);
    for (double t : {1.0, 2.5, 7.0}) {
      const double ab = spherical_average(pair(a, b), t, SphereWeight::cos_theta, q).value;
      const double ba = spherical_average(pair(b, a), t, SphereWeight::sin_theta, q).value;
      CHECK(ab == doctest::Approx(ba).epsilon(1e-6));
    }
  }
}

TEST_CASE("Monte Carlo sphere average is reproducible from its seed") {
  const auto nu = build_cantor({3, {0, 2}, 4});
  const auto mu3 = build_product({nu, nu, nu}, {kAlpha, kAlpha, kAlpha});
  const auto a = spherical_average(mu3, 5.0, SphereWeight::sin_theta, default_quadrature(3, 9));
  const auto b = spherical_average(mu3, 5.0, SphereWeight::sin_theta, default_quadrature(3, 9));
  CHECK(a.value == b.value);
  CHECK(a.stderr_value > 0.0);
  const auto c = spherical_average(mu3, 5.0, SphereWeight::sin_theta, default_quadrature(3, 10));
  CHECK(std::abs(a.value - c.value) <= 6.0 * (a.stderr_value + c.stderr_value));
}

TEST_CASE("solid average examples") {
  const auto atom = GridMeasure::point_mass(3, 8, 0);
  for (double t : {1.0, 9.0, 300.0}) CHECK(solid_average(atom, t, -1.0, 1.0).value == doctest::Approx(2.0));
  CHECK_THROWS_AS(solid_average(atom, 0.5, -1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(solid_average(atom, 2.0, 1.0, -1.0), ValidationError);

  const auto mt = build_cantor({3, {0, 2}, 8});
  std::vector<std::pair<double, double>> pts;
  for (int k = 1; k <= 6; ++k) {
    const double t = std::pow(3.0, k);
    pts.emplace_back(t, solid_average(mt, t, -1.0, 1.0).value);
  }
  CHECK(loglog_fit(pts).slope <= -kAlpha + 0.1);

  const auto uniform = build_cantor({2, {0, 1}, 10});
  std::vector<std::pair<double, double>> upts;
  for (double t : {4.0, 8.0, 16.0, 32.0, 64.0}) upts.emplace_back(t, solid_average(uniform, t, -1.0, 1.0).value);
  CHECK(loglog_fit(upts).slope == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("weighted spherical average is bounded by twice the solid average") {
  const auto nu = build_cantor({3, {0, 2}, 7});
  const auto mu = pair(nu, nu);
  const auto q = default_quadrature(2);
  for (double t : {3.0, 9.0, 27.0, 81.0, 200.0}) {
    const double sw = spherical_average(mu, t, SphereWeight::sin_theta, q).value;
    CHECK(sw <= 2.0 * solid_average(nu, t, -1.0, 1.0).value * (1.0 + 1e-6));
  }
}

TEST_CASE("stationary phase examples") {
  const double t_values[] = {100.0, 300.0, 1000.0, 3000.0};
  const auto axis = stationary_phase_check({1.0, 0.0}, t_values);
  for (const auto& row : axis.rows) CHECK(row.main == 0.0);
  // The stationary points sit on the kinks of |sin theta| here, so the
  // exact integral decays like (t|g|)^-1.
  CHECK(axis.residual_slope == doctest::Approx(-1.0).epsilon(0.05));

  // Off-axis, doubling t halves the residual-to-main ratio.
  const double doubling[] = {400.0, 800.0, 1600.0};
  const auto diag = stationary_phase_check({0.6, 0.8}, doubling);
  for (std::size_t k = 0; k + 1 < diag.rows.size(); ++k) {
    const double r0 = diag.rows[k].resid / diag.rows[k].main_envelope;
    const double r1 = diag.rows[k + 1].resid / diag.rows[k + 1].main_envelope;
    CHECK(r1 / r0 == doctest::Approx(0.5).epsilon(0.15));
  }

  const auto up = weighted_circle_integral({0.0, 1.0}, 100.0);
  const double main = 2.0 / std::sqrt(100.0) * std::cos(2.0 * oracle::kPi * (100.0 - 0.125));
  CHECK(std::abs(up.imag()) < 1e-12);
  CHECK(std::abs(up.real() - main) <= 0.1 * std::abs(main));

  CHECK_THROWS_AS(stationary_phase_check({0.0, 0.0}, t_values), ValidationError);
  const double short_t[] = {100.0, 200.0};
  CHECK_THROWS_AS(stationary_phase_check({0.0, 1.0}, short_t), ValidationError);
}

TEST_CASE("weighted circle integral agrees with a dense rule") {
  for (double t : {3.0, 40.0}) {
    const std::array<double, 2> g{0.6, 0.8};
    const auto got = weighted_circle_integral(g, t);
    long double re = 0.0L;
    const std::size_t n = std::size_t{1} << 20;
    for (std::size_t k = 0; k < n; ++k) {
      const double th = 2.0 * oracle::kPi * (k + 0.5) / n;
      re += std::cos(2.0 * oracle::kPi * t * (g[0] * std::cos(th) + g[1] * std::sin(th))) *
            std::abs(std::sin(th));
    }
    CHECK(got.real() == doctest::Approx(static_cast<double>(re) * 2.0 * oracle::kPi / n).epsilon(1e-8));
  }
}

TEST_CASE("angular decomposition on point masses") {
  const auto mu = point_pair();
  const CutoffFunction psi{CutoffKind::fejer, 2.0};
  const double t = 50.0;
  const auto d = angular_decomposition(mu, t, 0.2, psi);
  CHECK(d.theta_cut == doctest::Approx(std::pow(t, -0.2)));
  CHECK(d.near_zero == doctest::Approx(d.theta_cut).epsilon(1e-9));
  CHECK(d.near_half_pi == doctest::Approx(d.theta_cut).epsilon(1e-9));
  CHECK(d.near_zero + d.middle + d.near_half_pi == doctest::Approx(oracle::kPi / 2.0).epsilon(1e-9));
  CHECK(d.cs_constant == doctest::Approx(2.0 * oracle::kPi));
  CHECK(d.middle <= d.cs_bound);

  CHECK_THROWS_AS(angular_decomposition(mu, t, 0.0, psi), ValidationError);
  CHECK_THROWS_AS(angular_decomposition(mu, t, 0.5, psi), ValidationError);
  CHECK_THROWS_AS(angular_decomposition(mu, 0.5, 0.1, psi), ValidationError);
  CHECK_THROWS_AS(angular_decomposition(mu, t, 0.1, CutoffFunction{CutoffKind::fejer, 1.0}), ValidationError);
}

TEST_CASE("angular decomposition on middle-thirds products") {
  const auto nu = build_cantor({3, {0, 2}, 8});
  const auto mu = pair(nu, nu);
  const CutoffFunction psi{CutoffKind::fejer, 2.0};
  const auto d = angular_decomposition(mu, 243.0, 0.1, psi);
  CHECK(d.middle > 0.0);
  CHECK(d.middle <= d.cs_bound);
  // Quarter-circle pieces add up to a quarter of the unweighted average.
  const double quarter = spherical_average(mu, 243.0, SphereWeight::none, default_quadrature(2)).value / 4.0;
  CHECK(d.near_zero + d.middle + d.near_half_pi == doctest::Approx(quarter).epsilon(1e-5));
}
