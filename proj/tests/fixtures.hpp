#pragma once

#include "yamabe/constants.hpp"
#include "yamabe/correction.hpp"
#include "yamabe/groundstate.hpp"

namespace fixtures {

// Solved once per process and shared by every test case.
inline const yamabe::GroundState& gs33() {
  static const yamabe::GroundState gs = yamabe::solve_ground_state(3, 3.0);
  return gs;
}

inline const yamabe::CorrectionProfiles& cp33() {
  static const yamabe::CorrectionProfiles cp = yamabe::build_corrections(gs33());
  return cp;
}

inline const yamabe::DimensionalConstants& dc33() {
  static const yamabe::DimensionalConstants dc = yamabe::compute_constants(gs33(), cp33(), 3);
  return dc;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace fixtures
