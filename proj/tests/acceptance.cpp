#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "yamabe/constants.hpp"
#include "yamabe/correction.hpp"
#include "yamabe/fitting.hpp"
#include "yamabe/geometry.hpp"
#include "yamabe/groundstate.hpp"
#include "yamabe/multipeak.hpp"

using namespace yamabe;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<GroundState> table_ground_states() {
  std::vector<std::future<GroundState>> jobs;
  for (auto [n, m] : table_pairs(9)) {
    jobs.push_back(std::async(std::launch::async, [n, m] { return solve_ground_state(n, product_exponent(n, m)); }));
  }
  std::vector<GroundState> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

const GroundState& gs33() {
  static const GroundState gs = solve_ground_state(3, 3.0);
  return gs;
}
const CorrectionProfiles& cp33() {
  static const CorrectionProfiles cp = build_corrections(gs33());
  return cp;
}
const DimensionalConstants& dc33() {
  static const DimensionalConstants dc = compute_constants(gs33(), cp33(), 3);
  return dc;
}

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

// 1: every row of the n + m <= 9 table has beta < 0, in under two minutes.
Outcome beta_sign() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = beta_table(table_pairs(9));
  const double dt = seconds_since(t0);
  bool all = rows.size() == 10;
  double worst = -INFINITY;
  for (const auto& r : rows) {
    all = all && r.beta < 0;
    worst = std::max(worst, r.beta);
  }
  return {all && dt < 120, fmt("%zu rows, largest beta %.6g, %.1f s", rows.size(), worst, dt)};
}

// 2: energy, Pohozaev and alpha identities to 1e-6 for every table exponent.
Outcome identities() {
  double worst = 0;
  for (const auto& gs : table_ground_states()) {
    const auto r = identity_report(gs);
    worst = std::max({worst, r.e_energy, r.e_pohozaev, r.e_alpha});
  }
  return {worst < 1e-6, fmt("max relative identity error %.3g over 10 ground states", worst)};
}

// 3: L0(U' r) = -2 Lap U and L0 U = (2 - p) U^{p-1}.
Outcome l0_identities() {
  double worst = 0;
  std::string parts;
  for (auto [n, p] : {std::pair{3, 3.0}, std::pair{4, 8.0 / 3.0}, std::pair{5, 8.0 / 3.0}}) {
    const auto l = verify_L0_identities(n == 3 ? gs33() : solve_ground_state(n, p));
    worst = std::max({worst, l.e1, l.e2});
    parts += fmt(" (%d,%.4g): e1 %.2g e2 %.2g;", n, p, l.e1, l.e2);
  }
  return {worst < 1e-6, fmt("%s max %.3g", parts.c_str(), worst)};
}

// 4: full-dimension finite differences of L0 on psi(|z|) z1 z2.
Outcome psi_oracle() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> box(-3.0, 3.0);
  std::vector<std::vector<double>> pts;
  for (int k = 0; k < 200; ++k) pts.push_back({box(rng), box(rng), box(rng)});
  const double e = oracles::l0_psi_error(gs33(), cp33().psi, pts, 1e-3);
  return {e < 1e-3, fmt("relative error %.3g at 200 points of [-3,3]^3", e)};
}

// 5: beta by direct quadrature against c I2 - 2 c1.
Outcome beta_cross_check() {
  double worst = 0;
  for (const auto& r : beta_table(table_pairs(9))) worst = std::max(worst, rel(r.beta_check, r.beta));
  return {worst < 1e-6, fmt("max relative difference %.3g over 10 rows", worst)};
}

// 6: gamma is direction independent and above the Jensen bound.
Outcome gamma_invariance() {
  std::mt19937_64 rng(6);
  bool jensen = true;
  double spread = 0, oracle = 0;
  for (const auto& gs : table_ground_states()) {
    double lo = INFINITY, hi = -INFINITY;
    for (int k = 0; k < 10; ++k) {
      const double v = gamma(gs, random_unit(rng, gs.n)).value;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    spread = std::max(spread, (hi - lo) / hi);
    jensen = jensen && lo > gamma_zero(gs);
  }
  const double base = gamma(gs33(), {1, 0, 0}).value;
  for (int k = 0; k < 10; ++k) oracle = std::max(oracle, rel(oracles::gamma_direct_s2(gs33(), random_unit(rng, 3)), base));
  return {spread < 1e-8 && jensen && oracle < 1e-6,
          fmt("spread %.3g, Jensen bound %s, direct S^2 quadrature off by %.3g (n=3)", spread,
              jensen ? "holds" : "violated", oracle)};
}

// 7: one peak on the unit S^3 with (n, m) = (3, 3).
Outcome energy_expansion() {
  const auto t0 = std::chrono::steady_clock::now();
  const RoundSphere s3{3, 1.0};
  const auto& dc = dc33();
  const double s = 6.0;
  const double Phi = phi(curvature_round_sphere(3, 1.0), dc);
  const auto coeffs =
      energy_fit(gs33(), cp33(), dc, s3, {0.035, 0.05, 0.06, 0.07, 0.085, 0.1}, 3.0, CorrectionForm::Consistent);
  const double e2 = 0.5 * dc.beta * s;
  const bool a = rel(coeffs[1], e2) < 0.01;
  const bool b = rel(coeffs[2], Phi) < 0.05;

  std::vector<double> ratio;
  for (double eps : {0.1, 0.07, 0.05, 0.035}) {
    const PeakConfig config{eps, {north_pole(3)}, 3.0};
    const auto br = expansion_compare(config, s3, dc, gs33(), cp33());
    ratio.push_back(std::abs(br.remainder) / std::pow(eps, 4));
  }
  bool c = true;
  for (std::size_t i = 1; i < ratio.size(); ++i) c = c && ratio[i] < ratio[i - 1];
  const double dt = seconds_since(t0);
  return {a && b && c && dt < 300,
          fmt("(a) eps^2 coeff %.6g vs beta s/2 %.6g: %s; (b) eps^4 coeff %.5g vs Phi %.5g: %s; "
              "(c) |rem|/eps^4 = %.5g, %.5g, %.5g, %.5g: %s; %.1f s",
              coeffs[1], e2, a ? "ok" : "off", coeffs[2], Phi, b ? "ok" : "off", ratio[0], ratio[1], ratio[2],
              ratio[3], c ? "decreasing" : "not decreasing", dt)};
}

// 8: residual slope of Y against W on S^3.
Outcome residual_slopes() {
  const RoundSphere s3{3, 1.0};
  const std::vector<double> ladder{0.1, 0.07, 0.05, 0.035};
  std::vector<double> rw, ry;
  for (double eps : ladder) {
    const PeakConfig config{eps, {north_pole(3)}, 3.0};
    rw.push_back(residual_norm(build_W(gs33(), eps, north_pole(3), s3, 3.0, dc33().c_bold)));
    ry.push_back(residual_norm(build_Y(gs33(), cp33(), dc33(), config, s3, CorrectionForm::Consistent)));
  }
  const auto fw = fit_power_law(ladder, rw), fy = fit_power_law(ladder, ry);
  return {fy.slope >= 2.7 && fy.slope - fw.slope >= 0.7,
          fmt("slope Y %.4g (r2 %.6f), slope W %.4g (r2 %.6f), difference %.4g", fy.slope, fy.r2, fw.slope, fw.r2,
              fy.slope - fw.slope)};
}

// 9: warped curvature against the Christoffel oracle, and scan stability.
Outcome curvature_oracle() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coef(-0.1, 0.1), tt(0.2, std::numbers::pi - 0.2), xx(-0.8, 0.8);
  double worst = 0;
  for (int k = 0; k < 50; ++k) {
    const int n = 3 + k % 3;
    const double a = coef(rng), b = coef(rng), t = tt(rng);
    const auto c = curvature_warped_sphere(WarpedSphere{n, oracles::skew_warp(a, b)}, t);
    oracles::Vec q(n);
    q(0) = t;
    for (int i = 1; i < n; ++i) q(i) = xx(rng);
    const auto o = oracles::fd_curvature(oracles::warped_metric(n, oracles::skew_warp_ld(a, b)), q);
    for (auto [x, y] : {std::pair{c.s, double(o.s)}, std::pair{c.lap_s, double(o.lap_s)},
                        std::pair{c.ric2, double(o.ric2)}, std::pair{c.riem2, double(o.riem2)}}) {
      worst = std::max(worst, std::abs(x - y) / std::max(std::abs(y), 1.0));
    }
  }
  double shift = 0;
  bool same = true;
  for (const auto& model : {WarpedSphere{3, sine_series_warp({0.05})}, WarpedSphere{3, oracles::skew_warp(0.05, 0.04)}}) {
    const auto coarse = scan_phi(model, dc33(), 1000);
    const auto fine = scan_phi(model, dc33(), 2000);
    same = same && coarse.critical.size() == fine.critical.size();
    for (std::size_t i = 0; same && i < fine.critical.size(); ++i) {
      shift = std::max(shift, std::abs(coarse.critical[i].t - fine.critical[i].t));
    }
  }
  return {worst < 1e-5 && same && shift < 1e-6,
          fmt("oracle relative error %.3g over 50 samples; critical points %s, max shift %.3g under 2x refinement",
              worst, same ? "matched" : "changed", shift)};
}

// 10: every CLI command run twice gives identical bytes.
Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "yamabe-acceptance";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string bin = YAMABE_BIN;
  const std::vector<std::string> commands{
      "ground-state --n 3 --m 3",
      "psi --n 3 --m 3",
      "constants --n 3 --m 3 --seed 7",
      "beta-table --max-N 7",
      "beta-table --max-N 6 --format json",
      "phi-scan --m 3 --model warped --warp-coeffs 0.05 --resolution 500",
      "energy-check --m 3 --eps 0.1,0.07,0.05",
      "energy-check --m 3 --K 2 --eps 0.1"};
  int identical = 0;
  std::string failed;
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string out[2];
    for (int run = 0; run < 2; ++run) {
      const auto path = dir / ("run" + std::to_string(i) + "_" + std::to_string(run));
      const std::string cmd = bin + " " + commands[i] + " --out " + path.string() + " > /dev/null";
      if (std::system(cmd.c_str()) != 0) failed += " [exit] " + commands[i];
      out[run] = read(path);
    }
    if (!out[0].empty() && out[0] == out[1]) {
      ++identical;
    } else {
      failed += " [diff] " + commands[i];
    }
  }
  // a cache hit must reproduce the freshly solved record
  const auto cache = dir / "cache";
  std::string cached[2];
  for (int run = 0; run < 2; ++run) {
    const auto path = dir / ("cached" + std::to_string(run));
    const std::string cmd = bin + " ground-state --n 3 --m 3 --cache " + cache.string() + " --out " + path.string();
    if (std::system(cmd.c_str()) != 0) failed += " [exit] cached ground-state";
    cached[run] = read(path);
  }
  const bool cache_ok = !cached[0].empty() && cached[0] == cached[1];
  if (!cache_ok) failed += " [diff] cached ground-state";
  std::filesystem::remove_all(dir);
  return {identical == static_cast<int>(commands.size()) && cache_ok,
          fmt("%d/%zu commands identical, cache path %s%s", identical, commands.size(),
              cache_ok ? "identical" : "differs", failed.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{beta_sign,         identities,       l0_identities,
                                                       psi_oracle,        beta_cross_check, gamma_invariance,
                                                       energy_expansion,  residual_slopes,  curvature_oracle,
                                                       determinism};
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));
  bool all = true;
  for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) {
    if (!chosen.empty() && !chosen.count(k)) continue;
    Outcome o;
    try {
      o = criteria[k - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s: %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
