#pragma once

#include "yamabe/groundstate.hpp"
#include "yamabe/quadrature.hpp"
#include "yamabe/radial.hpp"

namespace yamabe {

/// Which second-order correction to assemble.
///
/// Published: V = (1/3) R_kl psi z_k z_l + c s v2base.
/// Consistent: V = -(1/3) [Rtf_kl psi z_k z_l + (s/n) w] + c s v2base, where Rtf is
/// the trace-free Ricci form and w solves the radial problem L0 w = r U'. This is
/// the V for which L0 V cancels the eps^2 residual of W exactly.
enum class CorrectionForm { Published, Consistent };

struct CorrectionProfiles {
  /// -psi'' - (n+3) psi'/r + psi - (p-1) U^{p-2} psi = U'/r
  RadialFunction psi;
  /// -w'' - (n-1) w'/r + w - (p-1) U^{p-2} w = r U'
  RadialFunction trace;
  /// U' r / 2 - U / (2-p)
  RadialFunction v2base;
  GroundState gs;
};

/// Radial BVP -phi'' - a phi'/r + phi - (p-1) U^{p-2} phi = rhs on the ground-state
/// grid, phi'(0) = 0, phi(r_max) = 0. Second-order centered differences, tridiagonal
/// direct solve, then one Richardson step against the every-other-node grid when the
/// node count allows it. `rhs_at_zero` is the limit of rhs at r = 0.
struct RadialSolve {
  RadialFunction phi;
  /// max |A phi - b| / max |b| of the fine discrete system.
  double discrete_residual = 0.0;
  bool richardson = false;
};
RadialSolve solve_radial_bvp(const GroundState& gs, double drift, const ScalarFn& rhs, double rhs_at_zero);

RadialFunction solve_psi(const GroundState& gs);
RadialFunction solve_trace(const GroundState& gs);
RadialFunction build_v2base(const GroundState& gs);
CorrectionProfiles build_corrections(const GroundState& gs);

struct L0Identities {
  double e1 = 0.0;  ///< L0(U' r) = -2 Delta U
  double e2 = 0.0;  ///< L0(U) = (2-p) U^{p-1}
};
/// Both residuals as max |lhs - rhs| / max |rhs| over r in [0.05, r_max/2]: e1 at
/// the nodes with U''' from differences of the nodal U'', e2 at cell midpoints
/// through the interpolant.
L0Identities verify_L0_identities(const GroundState& gs);

/// max |L0 v2base + U| / max |U| over the same midpoints.
double verify_v2_identity(const CorrectionProfiles& cp);

/// max over midpoints of |radial operator applied to phi - rhs| / max |rhs|, with
/// phi'' from the interpolant.
double radial_residual(const GroundState& gs, const RadialFunction& phi, double drift, const ScalarFn& rhs);

/// Integral over R^n of (U'/r) z1 z2 * d_1 U, by moment reduction. Zero by parity.
double kernel_orthogonality(const GroundState& gs);

/// Slope of -log|phi| against r over [0.3, 0.6] r_max.
double decay_rate(const RadialFunction& phi);

}  // namespace yamabe
