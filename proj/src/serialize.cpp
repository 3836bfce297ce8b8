#include "yamabe/serialize.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "yamabe/errors.hpp"

namespace yamabe {

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t mix(std::uint64_t h, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  return fnv1a(std::string_view(bytes, 8), h);
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t grid_hash(const RadialGrid& grid) {
  std::uint64_t h = fnv1a("radial-grid");
  for (double r : grid.nodes()) h = mix(h, r);
  return h;
}

nlohmann::json to_json(const GroundState& gs) {
  const auto& U = gs.U;
  nlohmann::json j;
  j["n"] = gs.n;
  j["p"] = gs.p;
  j["u0"] = gs.u0;
  j["decay_c"] = gs.decay_c;
  j["grid"] = {{"nodes", std::vector<double>(U.grid().nodes().begin(), U.grid().nodes().end())},
               {"r_max", U.r_max()},
               {"count", U.grid().size()},
               {"grading_length", gs.options.grading_length},
               {"hash", hex(grid_hash(U.grid()))}};
  j["values"] = std::vector<double>(U.values().begin(), U.values().end());
  j["derivatives"] = {{"first", std::vector<double>(U.first().begin(), U.first().end())},
                      {"second", std::vector<double>(U.second().begin(), U.second().end())}};
  j["I1"] = gs.I1;
  j["I2"] = gs.I2;
  j["Ip"] = gs.Ip;
  j["solver"] = {{"tol", gs.options.tol},
                 {"tail_floor", gs.options.tail_floor},
                 {"r_max_cap", gs.options.r_max_cap},
                 {"bracket_width", gs.bracket_width},
                 {"match_radius", gs.match_radius},
                 {"match_jump", gs.match_jump}};
  return j;
}

GroundState ground_state_from_json(const nlohmann::json& j) {
  try {
    RadialGrid grid(j.at("grid").at("nodes").get<std::vector<double>>());
    if (hex(grid_hash(grid)) != j.at("grid").at("hash").get<std::string>()) {
      throw Error(ErrorCode::Io, "ground-state record: grid hash mismatch");
    }
    const int n = j.at("n").get<int>();
    const double c = j.at("decay_c").get<double>();
    GroundStateOptions options;
    options.grid_nodes = grid.size();
    options.grading_length = j.at("grid").at("grading_length").get<double>();
    const auto& solver = j.at("solver");
    options.tol = solver.at("tol").get<double>();
    options.tail_floor = solver.at("tail_floor").get<double>();
    options.r_max_cap = solver.at("r_max_cap").get<double>();
    RadialFunction U(std::move(grid), j.at("values").get<std::vector<double>>(),
                     j.at("derivatives").at("first").get<std::vector<double>>(),
                     j.at("derivatives").at("second").get<std::vector<double>>(), decay_tail(n, c));
    return GroundState{n,
                       j.at("p").get<double>(),
                       std::move(U),
                       j.at("u0").get<double>(),
                       c,
                       j.at("I1").get<double>(),
                       j.at("I2").get<double>(),
                       j.at("Ip").get<double>(),
                       solver.at("bracket_width").get<double>(),
                       solver.at("match_radius").get<double>(),
                       solver.at("match_jump").get<double>(),
                       options};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed ground-state record: ") + e.what());
  }
}

nlohmann::json to_json(const DimensionalConstants& dc) {
  const auto& r = dc.raw;
  return {{"n", dc.n},
          {"m", dc.m},
          {"N", dc.N},
          {"p", dc.p},
          {"c_bold", dc.c_bold},
          {"alpha", dc.alpha},
          {"beta", dc.beta},
          {"beta_check", dc.beta_check},
          {"c1", dc.c1},
          {"c2", dc.c2},
          {"c3", dc.c3},
          {"c4", dc.c4},
          {"c5", dc.c5},
          {"c6", dc.c6},
          {"c7", dc.c7},
          {"c8", dc.c8},
          {"c9", dc.c9},
          {"raw",
           {{"I1", r.I1},
            {"I2", r.I2},
            {"Ip", r.Ip},
            {"M2", r.M2},
            {"M4", r.M4},
            {"G2", r.G2},
            {"PsiU4", r.PsiU4},
            {"UPsi2", r.UPsi2},
            {"Q2", r.Q2},
            {"UV2", r.UV2}}}};
}

nlohmann::json to_json(const IdentityReport& rep) {
  return {{"e_energy", rep.e_energy}, {"e_pohozaev", rep.e_pohozaev}, {"e_alpha", rep.e_alpha}};
}

GroundStateCache::GroundStateCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string GroundStateCache::key(int n, double p, const GroundStateOptions& o) const {
  std::uint64_t h = fnv1a("ground-state");
  h = mix(h, static_cast<double>(n));
  for (double v : {p, o.tol, static_cast<double>(o.grid_nodes), o.tail_floor, o.r_max_cap, o.grading_length}) {
    h = mix(h, v);
  }
  return "gs-n" + std::to_string(n) + "-" + hex(h) + ".json";
}

std::optional<GroundState> GroundStateCache::load(int n, double p, const GroundStateOptions& options) const {
  const auto path = dir_ / key(n, p, options);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    GroundState gs = ground_state_from_json(j);
    if (gs.n != n || gs.p != p) return std::nullopt;
    return gs;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void GroundStateCache::store(const GroundState& gs) const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  const auto path = dir_ / key(gs.n, gs.p, gs.options);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::Io, "cannot write cache entry " + tmp);
    out << to_json(gs).dump();
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot move cache entry into place: " + ec.message());
}

GroundState GroundStateCache::get_or_solve(int n, double p, const GroundStateOptions& options) const {
  if (auto hit = load(n, p, options)) return std::move(*hit);
  GroundState gs = solve_ground_state(n, p, options);
  store(gs);
  return gs;
}

}  // namespace yamabe
