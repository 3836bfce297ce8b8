#pragma once

#include <cstddef>

#include "yamabe/radial.hpp"

namespace yamabe {

struct GroundStateOptions {
  /// Final width of the bisection bracket on u0 = U(0).
  double tol = 1e-13;
  std::size_t grid_nodes = 6001;
  /// r_max is pushed out until the tail value drops below tail_floor * u0.
  double tail_floor = 1e-13;
  double r_max_cap = 60.0;
  double grading_length = 10.0;
};

/// Positive radial solution of -Delta U + U = U^{p-1} in R^n.
struct GroundState {
  int n = 0;
  double p = 0.0;
  RadialFunction U;
  double u0 = 0.0;
  /// lim U(r) r^{(n-1)/2} e^r; also the amplitude of the tail used past r_max.
  double decay_c = 0.0;
  double I1 = 0.0;  ///< int |grad U|^2
  double I2 = 0.0;  ///< int U^2
  double Ip = 0.0;  ///< int U^p

  double bracket_width = 0.0;
  /// Radius where the outward shot hands over to the inward tail integration,
  /// and the relative jump in U' there.
  double match_radius = 0.0;
  double match_jump = 0.0;
  GroundStateOptions options{};

  double r_max() const { return U.r_max(); }
  /// Interpolant on [0, r_max], decay_c r^{-(n-1)/2} e^{-r} beyond.
  Jet eval(double r) const { return U.eval(r); }
};

/// Largest exponent allowed for dimension n: 2n/(n-2).
double critical_exponent(int n);

/// p_N = 2N/(N-2) for the product dimension N = n + m.
double product_exponent(int n, int m);

GroundState solve_ground_state(int n, double p, const GroundStateOptions& options = {});
GroundState solve_ground_state(int n, double p, double tol);

/// The outward shot from U(0) = a sampled on `grid`, cut at the first node where
/// it stops being positive and decreasing (values there and beyond are zero).
RadialFunction shoot_profile(int n, double p, double a, const RadialGrid& grid);

/// Integrals I1, I2, Ip recomputed from a profile (tail included when present).
struct EnergyIntegrals {
  double I1 = 0.0;
  double I2 = 0.0;
  double Ip = 0.0;
  /// (1/2) I1 + (1/2) I2 - (1/p) Ip, integrated as a single integrand.
  double alpha = 0.0;
};
EnergyIntegrals energy_integrals(const RadialFunction& U, int n, double p);

/// Fits U r^{(n-1)/2} e^r and -U' r^{(n-1)/2} e^r over the outer tail window and
/// extrapolates both; throws TailTooShort if they disagree by more than 1%.
double decay_constant(const GroundState& gs);

struct IdentityReport {
  double e_energy = 0.0;    ///< |I1 + I2 - Ip| / Ip
  double e_pohozaev = 0.0;  ///< |(n-2)/2 I1 + n/2 I2 - n/p Ip| / Ip
  double e_alpha = 0.0;     ///< |alpha - (1/2 - 1/p) Ip| / |alpha|
};
IdentityReport identity_report(const GroundState& gs);

/// Invariant checks for an accepted solution.
struct GroundStateAudit {
  bool positive = false;
  bool decreasing = false;
  double max_node_residual = 0.0;
  double max_midpoint_residual = 0.0;
};
GroundStateAudit audit(const GroundState& gs);

/// The tail decay_c r^{-(n-1)/2} e^{-r} with its two derivatives.
RadialFunction::Tail decay_tail(int n, double decay_c);

/// A copy of gs restricted to r <= r_cut with the stored decay constant as tail.
GroundState truncate(const GroundState& gs, double r_cut);

}  // namespace yamabe
