#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/fitting.hpp"
#include "yamabe/multipeak.hpp"

using namespace yamabe;
using fixtures::cp33;
using fixtures::dc33;
using fixtures::gs33;
using fixtures::rel;

namespace {

const RoundSphere kS3{3, 1.0};
const std::vector<double> kLadder{0.1, 0.07, 0.05, 0.035};

PeakConfig single(double eps, double cutoff_r = 3.0) { return {eps, {north_pole(3)}, cutoff_r}; }

}  // namespace

TEST_SUITE("multipeak") {
  TEST_CASE("cutoff") {
    CHECK(cutoff(0.0, 1.0) == 1.0);
    CHECK(cutoff(1.0, 1.0) == 0.0);
    CHECK(cutoff(0.75, 1.0) > 0.0);
    CHECK(cutoff(0.75, 1.0) < 1.0);
    for (double d : {0.5, 1.0}) {
      CHECK(std::abs(cutoff_jet(d, 1.0).df) < 1e-12);
      CHECK(std::abs(cutoff_jet(d, 1.0).d2f) < 1e-12);
    }
    double prev = 1.0;
    for (int i = 0; i <= 100; ++i) {
      const double v = cutoff(0.5 + 0.005 * i, 1.0);
      CHECK(v <= prev);
      prev = v;
    }
  }

  TEST_CASE("W on the round sphere") {
    const auto& gs = gs33();
    const auto w = build_W(gs, 0.1, north_pole(3), kS3, 1.0, dc33().c_bold);
    CHECK(w(north_pole(3)) == gs.u0);
    CHECK(w(std::vector<double>{std::cos(1.0), std::sin(1.0), 0, 0}) == 0.0);
    CHECK_THROWS_AS(build_W(gs, 0.1, north_pole(3), kS3, 3.2, dc33().c_bold), Error);
  }

  TEST_CASE("eps-norm of W approaches I1 + I2") {
    const auto& gs = gs33();
    const double flat = gs.I1 + gs.I2;
    const auto w02 = build_W(gs, 0.02, north_pole(3), kS3, 3.0, dc33().c_bold);
    CHECK(rel(norm_eps(w02), flat) < 0.02);
    const auto w05 = build_W(gs, 0.05, north_pole(3), kS3, 3.0, dc33().c_bold);
    CHECK(rel(norm_eps(w05), flat) < 0.02);
    CHECK(rel(norm_eps(w05, {320}), norm_eps(w05, {160})) < 1e-4);
    CHECK_THROWS_AS(norm_eps(w05, {4}), Error);
    PeakSum none = w05;
    none.config.centers.clear();
    CHECK(norm_eps(none) == 0.0);
    CHECK(energy_J(none) == 0.0);
  }

  TEST_CASE("Y reduces to W without a correction") {
    const auto& gs = gs33();
    const PeakProfile bare(gs, nullptr, PeakForm::None, 0.1, 3.0, dc33().c_bold, 2.0);
    const auto w = build_W(gs, 0.1, north_pole(3), kS3, 3.0, dc33().c_bold);
    for (double d : {0.0, 0.05, 0.3, 1.2, 2.0}) CHECK(bare(d).f == w.profile(d).f);
  }

  TEST_CASE("assembled correction matches the direct formula") {
    const auto& cp = cp33();
    const double s = 6.0, c = dc33().c_bold;
    const std::vector<double> ric{2, 0, 0, 0, 2, 0, 0, 0, 2};
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> box(-4.0, 4.0);
    for (auto form : {CorrectionForm::Published, CorrectionForm::Consistent}) {
      const PeakProfile prof(gs33(), &cp, peak_form(form), 0.1, 3.0, c, 2.0);
      for (int k = 0; k < 100; ++k) {
        std::vector<double> z{box(rng), box(rng), box(rng)};
        const double r = std::hypot(z[0], z[1], z[2]);
        const double direct = correction_value(cp, form, ric, s, c, z);
        CHECK(std::abs(prof.correction(r).f - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
      }
    }
  }

  TEST_CASE("peak height is stable in eps") {
    const auto y1 = build_Y(gs33(), cp33(), dc33(), single(0.1), kS3, CorrectionForm::Consistent);
    const auto y2 = build_Y(gs33(), cp33(), dc33(), single(0.05), kS3, CorrectionForm::Consistent);
    CHECK(rel(y2(north_pole(3)), y1(north_pole(3))) < 0.01);
  }

  TEST_CASE("admissibility") {
    const auto& gs = gs33();
    const double eps = 0.1;
    CHECK(admissible(single(eps), gs, kS3, 1.0, north_pole(3)).admissible);
    const double d4 = eps * inverse_profile(gs, std::pow(eps, 4));
    const PeakConfig tight{eps, symmetric_pair(kS3, d4), 3.0};
    CHECK_FALSE(admissible(tight, gs, kS3, 3.0, north_pole(3)).admissible);
    const double d5 = eps * inverse_profile(gs, std::pow(eps, 5));
    const PeakConfig loose{eps, symmetric_pair(kS3, d5), 3.0};
    const auto a = admissible(loose, gs, kS3, 3.0, north_pole(3));
    CHECK(a.admissible);
    CHECK(a.margin > 0.0);
    CHECK_FALSE(admissible(loose, gs, kS3, 0.1, north_pole(3)).admissible);
  }

  TEST_CASE("flat profile solves the equation exactly") {
    const FlatSpace flat{3};
    const double inf = std::numeric_limits<double>::infinity();
    for (double eps : {0.1, 0.05}) {
      const auto w = build_W(gs33(), eps, {0.0, 0.0, 0.0}, flat, inf, dc33().c_bold);
      CHECK(residual_norm(w) < 1e-8);
    }
  }

  TEST_CASE("residual order improves with the correction") {
    std::vector<double> rw, ry;
    for (double eps : kLadder) {
      rw.push_back(residual_norm(build_W(gs33(), eps, north_pole(3), kS3, 3.0, dc33().c_bold)));
      ry.push_back(residual_norm(build_Y(gs33(), cp33(), dc33(), single(eps), kS3, CorrectionForm::Consistent)));
    }
    const auto fw = fit_power_law(kLadder, rw), fy = fit_power_law(kLadder, ry);
    CHECK(fw.slope == doctest::Approx(2.0).epsilon(0.05));
    CHECK(fy.slope >= 2.7);
    CHECK(fy.slope - fw.slope >= 0.7);
  }

  TEST_CASE("J(Y) - J(W) is fourth order") {
    std::vector<double> diff;
    for (double eps : kLadder) {
      const double jw = energy_J(build_W(gs33(), eps, north_pole(3), kS3, 3.0, dc33().c_bold));
      const double jy = energy_J(build_Y(gs33(), cp33(), dc33(), single(eps), kS3, CorrectionForm::Consistent));
      diff.push_back(std::abs(jy - jw));
    }
    CHECK(fit_power_law(kLadder, diff).slope >= 3.7);
  }

  TEST_CASE("J tends to alpha and its eps^2 coefficient is beta s / 2") {
    const auto& dc = dc33();
    const double j = energy_J(build_Y(gs33(), cp33(), dc, single(0.01), kS3, CorrectionForm::Consistent));
    CHECK(rel(j, dc.alpha) < 1e-3);
    const auto coeffs = energy_fit(gs33(), cp33(), dc, kS3, {0.035, 0.05, 0.06, 0.07, 0.085, 0.1}, 3.0,
                                   CorrectionForm::Consistent);
    CHECK(rel(coeffs[0], dc.alpha) < 1e-8);
    CHECK(rel(coeffs[1], 0.5 * dc.beta * 6.0) < 0.01);
    const auto s4 = sphere_fourth_order(gs33(), cp33(), dc, 1.0, CorrectionForm::Consistent);
    CHECK(rel(coeffs[2], s4.y4) < 0.02);
  }

  TEST_CASE("breakdown arithmetic") {
    const auto b = expansion_compare(single(0.07), kS3, dc33(), gs33(), cp33());
    CHECK(b.remainder == b.J_measured - (b.term_alpha + b.term_beta + b.term_phi + b.term_interaction));
    CHECK(b.K == 1);
    CHECK(b.term_interaction == 0.0);
  }

  TEST_CASE("two peaks: interaction and label symmetry") {
    const double eps = 0.1;
    const double d = eps * inverse_profile(gs33(), 1e-6);
    PeakConfig config{eps, symmetric_pair(kS3, d), 1.0};
    const QuadratureOptions q{40};
    const auto y = build_Y(gs33(), cp33(), dc33(), config, kS3, CorrectionForm::Consistent);
    const double dj = interaction_energy(y, q);
    const auto b = expansion_compare(config, kS3, dc33(), gs33(), cp33(), CorrectionForm::Consistent, q);
    CHECK(dj < 0.0);
    const double ratio = dj / b.term_interaction;
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 1.5);
    CHECK(b.admissible);
    std::swap(config.centers[0], config.centers[1]);
    const auto s = expansion_compare(config, kS3, dc33(), gs33(), cp33(), CorrectionForm::Consistent, q);
    CHECK(s.J_measured == b.J_measured);
    CHECK(s.term_interaction == b.term_interaction);
    CHECK(s.remainder == b.remainder);

    const PeakConfig close{eps, symmetric_pair(kS3, 0.4), 1.0};
    CHECK_FALSE(expansion_compare(close, kS3, dc33(), gs33(), cp33(), CorrectionForm::Consistent, q).admissible);
  }
}
