#include <doctest.h>

#include <cmath>
#include <numbers>

#include "yamabe/errors.hpp"
#include "yamabe/fitting.hpp"
#include "yamabe/quadrature.hpp"
#include "yamabe/radial.hpp"

using namespace yamabe;

TEST_SUITE("numerics") {
  TEST_CASE("graded grid starts at zero and is strictly increasing") {
    const auto g = RadialGrid::graded(30.0, 101);
    CHECK(g[0] == 0.0);
    CHECK(g.r_max() == doctest::Approx(30.0));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK(g.cell_of(g[50] + 1e-9) == 50);
    CHECK(g.truncated(15.0).r_max() <= 15.0);
  }

  TEST_CASE("grid rejects unsorted nodes") {
    CHECK_THROWS_AS(RadialGrid({0.0, 2.0, 1.0}), Error);
  }

  TEST_CASE("quintic interpolant reproduces a smooth profile") {
    const auto g = RadialGrid::graded(10.0, 401);
    std::vector<double> f, df, d2f;
    for (double r : g.nodes()) {
      f.push_back(std::exp(-r * r));
      df.push_back(-2 * r * std::exp(-r * r));
      d2f.push_back((4 * r * r - 2) * std::exp(-r * r));
    }
    RadialFunction u(g, f, df, d2f);
    for (double r : {0.013, 0.77, 1.5, 3.3}) {
      const Jet j = u.eval(r);
      CHECK(j.f == doctest::Approx(std::exp(-r * r)).epsilon(1e-9));
      CHECK(j.df == doctest::Approx(-2 * r * std::exp(-r * r)).epsilon(1e-6));
    }
    CHECK(u.eval(11.0).f == 0.0);
  }

  TEST_CASE("Gauss panels and the semi-infinite rule") {
    CHECK(integrate_panels(0.0, std::numbers::pi, 4, [](double x) { return std::sin(x); }) ==
          doctest::Approx(2.0).epsilon(1e-14));
    CHECK(integrate_to_infinity(1.0, [](double x) { return std::exp(-x); }) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  }

  TEST_CASE("sphere areas and moments") {
    CHECK(sphere_area(0) == doctest::Approx(2.0));
    CHECK(sphere_area(1) == doctest::Approx(2 * std::numbers::pi));
    CHECK(sphere_area(2) == doctest::Approx(4 * std::numbers::pi));
    // int_{S^2} z1^2 = 4 pi / 3, int_{S^2} z1^4 = 4 pi / 5
    CHECK(sphere_moment(Monomial::z1_squared(), 3) == doctest::Approx(4 * std::numbers::pi / 3));
    CHECK(sphere_moment(Monomial::z1_fourth(), 3) == doctest::Approx(4 * std::numbers::pi / 5));
    CHECK(sphere_moment(Monomial::z1_squared_z2_squared(), 3) == doctest::Approx(4 * std::numbers::pi / 15));
    CHECK(sphere_moment(Monomial::z1_squared_z2(), 3) == 0.0);
  }

  TEST_CASE("moment reduction of a Gaussian") {
    const auto g = RadialGrid::graded(12.0, 801);
    // int_{R^3} e^{-r^2} z1^2 dz = pi^{3/2} / 2
    const double v = moment_reduce(g, [](double r) { return std::exp(-r * r); }, Monomial::z1_squared(), 3);
    CHECK(v == doctest::Approx(std::pow(std::numbers::pi, 1.5) / 2).epsilon(1e-12));
  }

  TEST_CASE("power law and even polynomial fits") {
    std::vector<double> x{0.1, 0.07, 0.05, 0.035}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
    const auto fit = fit_power_law(x, y);
    CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0));
    CHECK_FALSE(fit.poor);

    std::vector<double> e{0.04, 0.05, 0.06, 0.08, 0.1}, v;
    for (double t : e) v.push_back(1.0 - 2.0 * t * t + 5.0 * std::pow(t, 4));
    const auto c = fit_even_polynomial(e, v, 2);
    REQUIRE(c.size() == 3);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[1] == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(c[2] == doctest::Approx(5.0).epsilon(1e-6));
  }
}
