#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <stdexcept>

#include "prodist/error.hpp"
#include "prodist/numeric.hpp"
#include "prodist/quadrature.hpp"

using namespace prodist;

TEST_CASE("compensated sum recovers cancelled terms") {
  const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(v) == 2.0);
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5, 6.02214076e23}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("stream seeds are distinct and reproducible") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(stream_seed(42, s));
  CHECK(seen.size() == 100);
  CHECK(stream_seed(42, 7) == stream_seed(42, 7));
  CHECK(stream_seed(42, 7) != stream_seed(43, 7));
}

TEST_CASE("parallel_map keeps index order and rethrows") {
  for (int workers : {1, 2, 5}) {
    const auto out = parallel_map(50, workers, [](std::size_t i) { return i * i; });
    REQUIRE(out.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) CHECK(out[i] == i * i);
  }
  CHECK_THROWS_AS(parallel_map(10, 3,
                               [](std::size_t i) {
                                 if (i == 6) throw std::runtime_error("boom");
                                 return i;
                               }),
                  std::runtime_error);
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 16}) {
    const auto rule = gauss_legendre(n);
    for (int deg = 0; deg < 2 * n; ++deg) {
      double s = 0.0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * std::pow(rule.nodes[k], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("doubling quadratures converge") {
  const auto g = gauss_doubling([](double x) { return std::exp(x); }, 0.0, 1.0, 1, 1e-13);
  CHECK(g.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  CHECK(g.converged);
  const auto p = periodic_trapezoid_doubling([](double th) { return std::exp(std::cos(th)); }, 8, 1e-14);
  // 2 pi I_0(1)
  CHECK(p.value == doctest::Approx(2.0 * kPi * 1.2660658777520082).epsilon(1e-13));
  CHECK_THROWS_AS(gauss_doubling([](double x) { return std::sin(1e9 * x); }, 0.0, 1.0, 1, 1e-15, 64),
                  ConvergenceError);
}
