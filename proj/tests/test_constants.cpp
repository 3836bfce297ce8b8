#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "oracles/oracles.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/quadrature.hpp"

using namespace yamabe;
using fixtures::cp33;
using fixtures::dc33;
using fixtures::gs33;
using fixtures::rel;

namespace {

std::vector<double> random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  std::vector<double> b(n);
  double len = 0;
  for (double& v : b) {
    v = normal(rng);
    len += v * v;
  }
  for (double& v : b) v /= std::sqrt(len);
  return b;
}

}  // namespace

TEST_SUITE("constants") {
  TEST_CASE("moment reduction of the pure tail") {
    const auto& grid = gs33().U.grid();
    const std::vector<double> zero(grid.size(), 0.0);
    const RadialFunction tail(grid, zero, zero, zero, decay_tail(3, 1.0));
    const double R = grid.r_max();
    // 4 pi int_R^inf (e^{-r}/r) r^2 dr = 4 pi (R + 1) e^{-R}
    CHECK(moment_reduce(tail, Monomial::one(), 3) == doctest::Approx(4 * std::numbers::pi * (R + 1) * std::exp(-R)).epsilon(1e-8));
    CHECK(moment_reduce(tail, Monomial::z1(), 3) == 0.0);
  }

  TEST_CASE("(3,3) constants") {
    const auto& dc = dc33();
    CHECK(dc.N == 6);
    CHECK(dc.p == 3.0);
    CHECK(dc.c_bold == 0.2);
    CHECK(dc.beta < 0.0);
    CHECK(dc.beta == doctest::Approx(-2.13284).epsilon(1e-5));
    CHECK(rel(dc.beta_check, dc.beta) < 1e-6);
    CHECK(dc.alpha > 0.0);
    CHECK(dc.c1 > 0.0);
    CHECK(dc.c2 > 0.0);
    CHECK(rel(dc.alpha, (0.5 - 1.0 / dc.p) * dc.raw.Ip) < 1e-6);
    CHECK(rel(dc.raw.M4, 3.0 / (3.0 * 5.0) * dc.raw.G2) < 1e-8);
  }

  TEST_CASE("compositional identities are exact") {
    const auto& d = dc33();
    const double n = d.n, c = d.c_bold;
    CHECK(d.c6 == 8 * d.c1 - 120 * (n + 2) * d.c3);
    CHECK(d.c8 == 18 * d.c1 + 30 * c * d.c2 * (n + 2));
    CHECK(d.c7 == -d.c3 - d.c4 - d.c5 - d.c2 * c / 12 + d.c1 / (24 * (n + 2)));
    CHECK(std::signbit(d.c9) == std::signbit(d.raw.UV2));
  }

  TEST_CASE("exponent mismatch") {
    try {
      compute_constants(gs33(), cp33(), 4);
      FAIL("expected ExponentMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ExponentMismatch);
    }
  }

  TEST_CASE("(4,4) beta cross-check") {
    const auto dc = compute_constants(4, 4);
    CHECK(dc.p == doctest::Approx(8.0 / 3.0));
    CHECK(rel(dc.beta_check, dc.beta) < 1e-6);
    CHECK(dc.beta < 0.0);
  }

  TEST_CASE("gamma") {
    const auto& gs = gs33();
    std::mt19937_64 rng(5);
    const double base = gamma(gs, {1.0, 0.0, 0.0}).value;
    CHECK(base > gamma_zero(gs));
    CHECK(base == doctest::Approx(201.934).epsilon(1e-5));
    for (int k = 0; k < 3; ++k) {
      const auto b = random_unit(rng, 3);
      CHECK(rel(gamma(gs, b).value, base) < 1e-8);
      CHECK(rel(oracles::gamma_direct_s2(gs, b), base) < 1e-6);
    }
    try {
      gamma(gs, {1.0, 1.0, 0.0});
      FAIL("expected NotUnit");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotUnit);
    }
  }

  TEST_CASE("table enumeration") {
    CHECK(table_pairs(9).size() == 10);
    const auto six = table_pairs(6);
    REQUIRE(six.size() == 1);
    CHECK(six[0] == std::pair{3, 3});
    const auto rows = beta_table(six);
    const auto csv = beta_table_csv(rows);
    CHECK(csv.rfind("n,m,N,p,alpha,beta,c1,c2,c3,c4,c5,c6,c7,c8,c9\n", 0) == 0);
    CHECK(csv.find("\n3,3,6,3,") != std::string::npos);
    CHECK(beta_table_csv(beta_table(six)) == csv);
  }
}
