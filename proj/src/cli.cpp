#include "yamabe/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "yamabe/constants.hpp"
#include "yamabe/correction.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/fitting.hpp"
#include "yamabe/geometry.hpp"
#include "yamabe/groundstate.hpp"
#include "yamabe/multipeak.hpp"
#include "yamabe/serialize.hpp"

namespace yamabe::cli {

namespace {

using nlohmann::json;

struct Flags {
  int n = 3;
  std::optional<int> m;
  std::optional<double> p;
  int max_N = 9;
  std::string model = "round";
  std::string profile;
  std::vector<double> warp_coeffs;
  std::vector<double> eps{0.1, 0.07, 0.05, 0.035};
  int K = 1;
  double rho = std::numbers::pi;
  std::uint64_t seed = 1;
  std::string out;
  std::string csv;
  std::string format = "csv";
  std::string cache;
  std::string form = "consistent";
  double radius = 1.0;
  double cutoff = 3.0;
  std::optional<double> distance;
  std::optional<int> nodes_per_eps;
  int resolution = 2000;
  int directions = 10;
  GroundStateOptions grid;
};

json provenance(const Flags& f) {
  return {{"version", kVersion},
          {"grid",
           {{"nodes", f.grid.grid_nodes},
            {"grading_length", f.grid.grading_length},
            {"tol", f.grid.tol},
            {"tail_floor", f.grid.tail_floor},
            {"r_max_cap", f.grid.r_max_cap}}},
          {"seed", f.seed}};
}

void emit(const Flags& f, const std::string& text, std::ostream& out) {
  if (f.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(f.out, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::Io, "cannot open " + f.out + " for writing");
  file << text;
  if (!file) throw Error(ErrorCode::Io, "write to " + f.out + " failed");
}

void emit_json(const Flags& f, const json& j, std::ostream& out) { emit(f, j.dump(2) + "\n", out); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  file << text;
}

/// CSV files carry the provenance as a leading comment line.
std::string csv_with_provenance(const Flags& f, const std::string& csv) {
  return "# " + provenance(f).dump() + "\n" + csv;
}

double exponent(const Flags& f) {
  if (f.p) return *f.p;
  if (f.m) return product_exponent(f.n, *f.m);
  throw Error(ErrorCode::InvalidArgument, "give --p or --m");
}

int factor_dimension(const Flags& f) {
  if (!f.m) throw Error(ErrorCode::InvalidArgument, "this command needs --m");
  return *f.m;
}

GroundState ground_state(const Flags& f, double p) {
  if (f.cache.empty()) return solve_ground_state(f.n, p, f.grid);
  return GroundStateCache(f.cache).get_or_solve(f.n, p, f.grid);
}

CorrectionForm correction_form(const std::string& name) {
  if (name == "consistent") return CorrectionForm::Consistent;
  if (name == "published") return CorrectionForm::Published;
  throw Error(ErrorCode::InvalidArgument, "--form must be consistent or published");
}

std::vector<double> span_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

json fit_json(const PowerLawFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}, {"poor", fit.poor}};
}

void cmd_ground_state(const Flags& f, std::ostream& out) {
  const GroundState gs = ground_state(f, exponent(f));
  const GroundStateAudit a = audit(gs);
  json j{{"provenance", provenance(f)},
         {"ground_state", to_json(gs)},
         {"identities", to_json(identity_report(gs))},
         {"audit",
          {{"positive", a.positive},
           {"decreasing", a.decreasing},
           {"max_node_residual", a.max_node_residual},
           {"max_midpoint_residual", a.max_midpoint_residual}}}};
  emit_json(f, j, out);
}

void cmd_psi(const Flags& f, std::ostream& out) {
  const GroundState gs = ground_state(f, exponent(f));
  const CorrectionProfiles cp = build_corrections(gs);
  const L0Identities l0 = verify_L0_identities(gs);
  json profiles{{"r", span_vector(gs.U.grid().nodes())}};
  auto add = [&](const char* name, const RadialFunction& g) {
    profiles[name] = {{"value", span_vector(g.values())}, {"first", span_vector(g.first())}};
  };
  add("psi", cp.psi);
  add("trace", cp.trace);
  add("v2base", cp.v2base);
  json j{{"provenance", provenance(f)},
         {"n", gs.n},
         {"p", gs.p},
         {"psi0", cp.psi.values()[0]},
         {"diagnostics",
          {{"l0_identity_e1", l0.e1},
           {"l0_identity_e2", l0.e2},
           {"v2_identity", verify_v2_identity(cp)},
           {"kernel_orthogonality", kernel_orthogonality(gs)},
           {"decay_rate_psi", decay_rate(cp.psi)},
           {"decay_rate_trace", decay_rate(cp.trace)}}},
         {"profiles", profiles}};
  emit_json(f, j, out);
}

void cmd_constants(const Flags& f, std::ostream& out) {
  const int m = factor_dimension(f);
  const GroundState gs = ground_state(f, product_exponent(f.n, m));
  const CorrectionProfiles cp = build_corrections(gs);
  const DimensionalConstants dc = compute_constants(gs, cp, m);

  std::mt19937_64 rng(f.seed);
  std::normal_distribution<double> normal;
  json samples = json::array();
  double lo = INFINITY, hi = -INFINITY;
  for (int k = 0; k < f.directions; ++k) {
    std::vector<double> b(static_cast<std::size_t>(f.n));
    double len = 0.0;
    for (double& x : b) {
      x = normal(rng);
      len += x * x;
    }
    len = std::sqrt(len);
    for (double& x : b) x /= len;
    const GammaValue g = gamma(gs, b);
    lo = std::min(lo, g.value);
    hi = std::max(hi, g.value);
    samples.push_back({{"b", g.b}, {"gamma", g.value}});
  }
  const double g0 = gamma_zero(gs);
  json j{{"provenance", provenance(f)},
         {"constants", to_json(dc)},
         {"gamma",
          {{"samples", samples},
           {"spread", f.directions > 0 ? (hi - lo) / std::abs(hi) : 0.0},
           {"jensen_bound", g0},
           {"above_jensen", f.directions > 0 && lo > g0}}}};
  emit_json(f, j, out);
}

void cmd_beta_table(const Flags& f, std::ostream& out) {
  if (f.max_N < 6) throw Error(ErrorCode::InvalidArgument, "--max-N must be at least 6");
  const auto rows = beta_table(table_pairs(f.max_N), f.grid);
  if (f.format == "csv") {
    emit(f, csv_with_provenance(f, beta_table_csv(rows)), out);
  } else if (f.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    emit_json(f, {{"provenance", provenance(f)}, {"rows", arr}}, out);
  } else {
    throw Error(ErrorCode::InvalidArgument, "--format must be csv or json");
  }
}

ManifoldModel scan_model(const Flags& f) {
  if (f.model == "round") return RoundSphere{f.n, f.radius};
  if (f.model == "warped") {
    if (!f.profile.empty()) return WarpedSphere{f.n, read_warp_csv(f.profile)};
    return WarpedSphere{f.n, sine_series_warp(f.warp_coeffs)};
  }
  throw Error(ErrorCode::InvalidArgument, "--model must be round or warped");
}

void cmd_phi_scan(const Flags& f, std::ostream& out) {
  const int m = factor_dimension(f);
  const ManifoldModel model = scan_model(f);
  const DimensionalConstants dc = compute_constants(f.n, m, f.grid);
  const PhiScan scan = sample_phi(model, dc, f.resolution);

  json critical = json::array();
  for (const auto& c : scan.critical) {
    critical.push_back({{"t", c.t}, {"phi", c.phi}, {"second", c.second}, {"kind", to_string(c.kind)}});
  }
  json samples = json::array();
  for (const auto& s : scan.samples) {
    samples.push_back({{"t", s.t},
                       {"s", s.cp.s},
                       {"lap_s", s.cp.lap_s},
                       {"ric2", s.cp.ric2},
                       {"riem2", s.cp.riem2},
                       {"phi", s.phi}});
  }
  json j{{"provenance", provenance(f)},
         {"model", f.model},
         {"profile", f.profile},
         {"warp_coeffs", f.warp_coeffs},
         {"n", f.n},
         {"m", m},
         {"resolution", f.resolution},
         {"critical", critical},
         {"samples", samples}};
  if (scan.critical.empty()) {
    try {
      (void)scan_phi(model, dc, f.resolution);
    } catch (const Error& e) {
      j["warning"] = {{"error", std::string(to_string(e.code()))}, {"detail", e.what()}};
    }
  }
  if (!f.csv.empty()) write_file(f.csv, csv_with_provenance(f, scan_csv(scan)));
  emit_json(f, j, out);
}

json breakdown_json(const EnergyBreakdown& b) {
  return {{"epsilon", b.epsilon},
          {"K", b.K},
          {"J_measured", b.J_measured},
          {"term_alpha", b.term_alpha},
          {"term_beta", b.term_beta},
          {"term_phi", b.term_phi},
          {"term_interaction", b.term_interaction},
          {"remainder", b.remainder},
          {"admissible", b.admissible}};
}

void cmd_energy_check(const Flags& f, std::ostream& out) {
  if (f.model != "round") throw Error(ErrorCode::InvalidArgument, "energy-check runs on --model round");
  if (f.K != 1 && f.K != 2) throw Error(ErrorCode::InvalidArgument, "--K must be 1 or 2");
  if (f.eps.empty()) throw Error(ErrorCode::InvalidArgument, "--eps needs at least one value");
  const int m = factor_dimension(f);
  const CorrectionForm form = correction_form(f.form);
  const GroundState gs = ground_state(f, product_exponent(f.n, m));
  const CorrectionProfiles cp = build_corrections(gs);
  const DimensionalConstants dc = compute_constants(gs, cp, m);
  const RoundSphere sphere{f.n, f.radius};
  const ManifoldModel model = sphere;
  QuadratureOptions q;
  q.nodes_per_eps = f.nodes_per_eps.value_or(f.K == 1 ? 160 : 40);
  std::vector<double> pole = north_pole(f.n);
  for (double& x : pole) x *= f.radius;

  json rows = json::array();
  std::vector<double> eps, remainder, res_w, res_y;
  for (double e : f.eps) {
    PeakConfig config{e, {pole}, f.cutoff};
    double d = 0.0;
    if (f.K == 2) {
      d = f.distance.value_or(e * inverse_profile(gs, 1e-6));
      config.centers = symmetric_pair(sphere, d);
    }
    const Admissibility adm = admissible(config, gs, sphere, f.rho, pole);
    EnergyBreakdown b = expansion_compare(config, model, dc, gs, cp, form, q);
    b.admissible = adm.admissible;
    json row = breakdown_json(b);
    row["remainder_over_eps4"] = b.remainder / std::pow(e, 4);
    row["admissibility"] = {{"within_rho", adm.within_rho},
                            {"interaction_sum", adm.interaction_sum},
                            {"margin", adm.margin}};
    if (f.K == 2) row["distance"] = d;
    if (f.K == 1) {
      const PeakSum w = build_W(gs, e, pole, model, f.cutoff, dc.c_bold);
      const PeakSum y = build_Y(gs, cp, dc, config, model, form);
      row["residual_W"] = residual_norm(w, q);
      row["residual_Y"] = residual_norm(y, q);
      res_w.push_back(row["residual_W"]);
      res_y.push_back(row["residual_Y"]);
    }
    eps.push_back(e);
    remainder.push_back(std::abs(b.remainder));
    rows.push_back(row);
  }

  json fits = json::object();
  if (eps.size() >= 2) {
    fits["remainder"] = fit_json(fit_power_law(eps, remainder));
    if (f.K == 1) {
      const PowerLawFit fw = fit_power_law(eps, res_w), fy = fit_power_law(eps, res_y);
      fits["residual_W"] = fit_json(fw);
      fits["residual_Y"] = fit_json(fy);
      fits["residual_slope_difference"] = fy.slope - fw.slope;
    }
  }
  // |remainder| / eps^4 must shrink as eps does.
  std::vector<std::size_t> order(eps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps[a] > eps[b]; });
  bool decreasing = true;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double prev = remainder[order[k - 1]] / std::pow(eps[order[k - 1]], 4);
    const double next = remainder[order[k]] / std::pow(eps[order[k]], 4);
    if (!(next < prev)) decreasing = false;
  }

  json j{{"provenance", provenance(f)},
         {"model", {{"name", "round"}, {"n", f.n}, {"radius", f.radius}}},
         {"m", m},
         {"K", f.K},
         {"form", f.form},
         {"cutoff_r", f.cutoff},
         {"rho", f.rho},
         {"nodes_per_eps", q.nodes_per_eps},
         {"breakdowns", rows},
         {"fit", fits},
         {"remainder_over_eps4_decreasing", decreasing}};
  emit_json(f, j, out);
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--n", f.n, "dimension n")->check(CLI::Range(2, 12));
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--out", f.out, "output file (stdout when absent)");
  sub->add_option("--cache", f.cache, "ground-state cache directory");
}

void add_exponent(CLI::App* sub, Flags& f) {
  auto* m = sub->add_option("--m", f.m, "factor dimension m; p = 2N/(N-2) with N = n + m");
  sub->add_option("--p", f.p, "exponent p")->excludes(m);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out) {
  Flags f;
  CLI::App app{"Ground states, dimensional constants and peak energies for the subcritical Yamabe problem"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);

  auto* gs = app.add_subcommand("ground-state", "solve -U'' - (n-1)U'/r + U = U^{p-1}");
  add_common(gs, f);
  add_exponent(gs, f);

  auto* psi = app.add_subcommand("psi", "correction profiles psi, w and v2base");
  add_common(psi, f);
  add_exponent(psi, f);

  auto* constants = app.add_subcommand("constants", "alpha, beta, c1..c9 and gamma for (n, m)");
  add_common(constants, f);
  constants->add_option("--m", f.m, "factor dimension m")->required();
  constants->add_option("--directions", f.directions, "random gamma directions")->check(CLI::NonNegativeNumber);

  auto* table = app.add_subcommand("beta-table", "constants for all n, m >= 3 with n + m <= max-N");
  table->add_option("--max-N", f.max_N, "largest N = n + m");
  table->add_option("--format", f.format, "csv or json");
  table->add_option("--seed", f.seed, "RNG seed");
  table->add_option("--out", f.out, "output file (stdout when absent)");

  auto* scan = app.add_subcommand("phi-scan", "scan Phi along a meridian and classify critical points");
  add_common(scan, f);
  scan->add_option("--m", f.m, "factor dimension m")->required();
  scan->add_option("--model", f.model, "round or warped");
  scan->add_option("--profile", f.profile, "warp profile CSV with rows t,f");
  scan->add_option("--warp-coeffs", f.warp_coeffs, "f = sin t + sum_k c_k sin^{k+2} t")->delimiter(',');
  scan->add_option("--radius", f.radius, "round sphere radius");
  scan->add_option("--resolution", f.resolution, "scan intervals");
  scan->add_option("--csv", f.csv, "also write the scan as CSV here");

  auto* energy = app.add_subcommand("energy-check", "compare J(Y) with its expansion on a round sphere");
  add_common(energy, f);
  energy->add_option("--m", f.m, "factor dimension m")->required();
  energy->add_option("--model", f.model, "round");
  energy->add_option("--radius", f.radius, "sphere radius");
  energy->add_option("--K", f.K, "number of peaks (1 or 2)");
  energy->add_option("--eps", f.eps, "comma separated epsilon ladder")->delimiter(',');
  energy->add_option("--rho", f.rho, "admissibility radius about the north pole");
  energy->add_option("--form", f.form, "consistent or published correction");
  energy->add_option("--cutoff", f.cutoff, "cutoff radius");
  energy->add_option("--distance", f.distance, "peak separation for K = 2");
  energy->add_option("--nodes-per-eps", f.nodes_per_eps, "quadrature nodes per eps");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    out << (e.get_name() == "CallForVersion" ? std::string(kVersion) + "\n" : app.help());
    return 0;
  } catch (const CLI::ParseError& e) {
    out << json{{"error", "InvalidArgument"}, {"detail", e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    if (gs->parsed()) cmd_ground_state(f, out);
    if (psi->parsed()) cmd_psi(f, out);
    if (constants->parsed()) cmd_constants(f, out);
    if (table->parsed()) cmd_beta_table(f, out);
    if (scan->parsed()) cmd_phi_scan(f, out);
    if (energy->parsed()) cmd_energy_check(f, out);
  } catch (const Error& e) {
    out << json{{"error", std::string(to_string(e.code()))}, {"detail", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    out << json{{"error", "Internal"}, {"detail", e.what()}}.dump() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace yamabe::cli
