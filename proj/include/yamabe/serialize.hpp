#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "yamabe/constants.hpp"
#include "yamabe/groundstate.hpp"

namespace yamabe {

/// Shortest fixed form used in every CSV cell: printf %.15g.
std::string format_number(double v);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);
std::uint64_t grid_hash(const RadialGrid& grid);

nlohmann::json to_json(const GroundState& gs);
GroundState ground_state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DimensionalConstants& dc);
nlohmann::json to_json(const IdentityReport& rep);

/// Content-addressed store of solved ground states. Entries are keyed by (n, p)
/// and the solver options; each file records the hash of its grid and is
/// rejected on load if the grid no longer hashes to it.
class GroundStateCache {
 public:
  explicit GroundStateCache(std::filesystem::path dir);

  std::string key(int n, double p, const GroundStateOptions& options) const;
  std::optional<GroundState> load(int n, double p, const GroundStateOptions& options) const;
  void store(const GroundState& gs) const;
  GroundState get_or_solve(int n, double p, const GroundStateOptions& options = {}) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace yamabe
