#include "yamabe/groundstate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/numeric/odeint.hpp>

#include "yamabe/errors.hpp"
#include "yamabe/quadrature.hpp"

namespace yamabe {

namespace {

namespace odeint = boost::numeric::odeint;

using State = std::array<double, 2>;
using Stepper = odeint::runge_kutta_fehlberg78<State>;

constexpr double kAbsTol = 1e-30;
constexpr double kRelTol = 1e-13;
constexpr double kSeriesRadius = 1e-3;

double signed_pow(double u, double e) { return std::copysign(std::pow(std::abs(u), e), u); }

struct Radial {
  int n;
  double p;
  void operator()(const State& x, State& dxdr, double r) const {
    dxdr[0] = x[1];
    dxdr[1] = -(n - 1) * x[1] / r + x[0] - signed_pow(x[0], p - 1.0);
  }
  double second(double r, double u, double du) const {
    if (r == 0.0) return (u - signed_pow(u, p - 1.0)) / n;
    return -(n - 1) * du / r + u - signed_pow(u, p - 1.0);
  }
};

/// U(r) = a + b r^2 + c r^4 near the origin.
State series_start(const Radial& ode, double a, double r) {
  const double g = a - std::pow(a, ode.p - 1.0);
  const double dg = 1.0 - (ode.p - 1.0) * std::pow(a, ode.p - 2.0);
  const double b = g / (2.0 * ode.n);
  const double c = dg * b / (4.0 * (ode.n + 2.0));
  return {a + b * r * r + c * r * r * r * r, 2.0 * b * r + 4.0 * c * r * r * r};
}

enum class Shot { Overshoot, Undershoot };

/// Overshoot: U crosses zero. Undershoot: U turns upward while positive (or never
/// leaves the positive decreasing regime before r_cap).
Shot classify(const Radial& ode, double a, double r_cap) {
  auto stepper = odeint::make_controlled(kAbsTol, kRelTol, Stepper());
  State x = series_start(ode, a, kSeriesRadius);
  double r = kSeriesRadius;
  double dr = 1e-3;
  while (r < r_cap) {
    if (stepper.try_step(ode, x, r, dr) == odeint::fail) continue;
    if (x[0] < 0.0) return Shot::Overshoot;
    if (x[1] > 0.0) return Shot::Undershoot;
    dr = std::min(dr, 0.25);
  }
  return Shot::Undershoot;
}

/// Samples the outward shot at the given strictly increasing radii (all > 0).
std::vector<State> shoot_at(const Radial& ode, double a, std::span<const double> radii) {
  std::vector<State> out;
  out.reserve(radii.size());
  std::vector<double> times;
  times.reserve(radii.size() + 1);
  times.push_back(kSeriesRadius);
  for (double r : radii) {
    if (r <= kSeriesRadius) {
      out.push_back(series_start(ode, a, r));
    } else {
      times.push_back(r);
    }
  }
  if (times.size() > 1) {
    State x = series_start(ode, a, kSeriesRadius);
    std::size_t seen = 0;
    odeint::integrate_times(odeint::make_controlled(kAbsTol, kRelTol, Stepper()), ode, x, times.begin(),
                            times.end(), 1e-3, [&](const State& s, double) {
                              if (seen++ > 0) out.push_back(s);
                            });
  }
  return out;
}

/// Linear tail C r^{-nu} K_nu(r), nu = n/2 - 1, and its derivative.
State bessel_tail(int n, double amplitude, double r) {
  const double nu = 0.5 * n - 1.0;
  const double scale = amplitude * std::pow(r, -nu);
  return {scale * boost::math::cyl_bessel_k(nu, r), -scale * boost::math::cyl_bessel_k(nu + 1.0, r)};
}

/// Integrates inward from r_max (first entry of `radii`, decreasing) starting on the tail.
std::vector<State> shoot_inward(const Radial& ode, double amplitude, std::span<const double> radii) {
  std::vector<State> out;
  out.reserve(radii.size());
  State x = bessel_tail(ode.n, amplitude, radii.front());
  odeint::integrate_times(odeint::make_controlled(kAbsTol, kRelTol, Stepper()), ode, x, radii.begin(),
                          radii.end(), -1e-3, [&](const State& s, double) { out.push_back(s); });
  return out;
}

Jet asymptotic_tail(int n, double c, double r) {
  const double k = 0.5 * (n - 1);
  const double f = c * std::pow(r, -k) * std::exp(-r);
  const double q = k / r + 1.0;
  return {f, -f * q, f * (q * q + k / (r * r))};
}


void check_exponent(int n, double p) {
  if (n <= 2) {
    throw Error(ErrorCode::SubcriticalViolation, "dimension must exceed 2");
  }
  const double pc = critical_exponent(n);
  if (!(p > 2.0) || !(p < pc)) {
    std::ostringstream os;
    os << "exponent p=" << p << " outside the subcritical range (2, " << pc << ") for n=" << n;
    throw Error(ErrorCode::SubcriticalViolation, os.str());
  }
}

}  // namespace

RadialFunction::Tail decay_tail(int n, double c) {
  return [n, c](double r) { return asymptotic_tail(n, c, r); };
}

double critical_exponent(int n) { return 2.0 * n / (n - 2.0); }

double product_exponent(int n, int m) {
  const int big_n = n + m;
  return 2.0 * big_n / (big_n - 2.0);
}

RadialFunction shoot_profile(int n, double p, double a, const RadialGrid& grid) {
  const Radial ode{n, p};
  const auto nodes = grid.nodes();
  std::vector<double> f(nodes.size(), 0.0), df(nodes.size(), 0.0), d2f(nodes.size(), 0.0);
  f[0] = a;
  d2f[0] = ode.second(0.0, a, 0.0);
  const auto states = shoot_at(ode, a, nodes.subspan(1));
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const State& s = states[i - 1];
    if (!(s[0] > 0.0) || s[1] > 0.0 || !std::isfinite(s[0])) break;
    f[i] = s[0];
    df[i] = s[1];
    d2f[i] = ode.second(nodes[i], s[0], s[1]);
  }
  return RadialFunction(grid, std::move(f), std::move(df), std::move(d2f));
}

GroundState solve_ground_state(int n, double p, double tol) {
  GroundStateOptions options;
  options.tol = tol;
  return solve_ground_state(n, p, options);
}

GroundState solve_ground_state(int n, double p, const GroundStateOptions& options) {
  check_exponent(n, p);
  const Radial ode{n, p};
  const double r_cap = options.r_max_cap;

  // Any a <= 1 undershoots: U'' > 0 at the origin.
  double lo = 1.0;
  double hi = 2.0;
  while (classify(ode, hi, r_cap) == Shot::Undershoot) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw Error(ErrorCode::NoBracket, "no overshooting initial value below 1e8");
  }
  while (hi - lo > options.tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (classify(ode, mid, r_cap) == Shot::Overshoot ? hi : lo) = mid;
  }
  const double a = 0.5 * (lo + hi);

  // The true profile lies between the two bracket shots; trust the outward shot
  // where they still agree to 1e-9 relative.
  std::vector<double> probe;
  for (double r = 0.05; r < r_cap; r += 0.05) probe.push_back(r);
  const auto s_lo = shoot_at(ode, lo, probe);
  const auto s_hi = shoot_at(ode, hi, probe);
  double r_trust = 0.0;
  double u_trust = a;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double u_mid = 0.5 * (s_lo[i][0] + s_hi[i][0]);
    if (!(u_mid > 0.0) || std::abs(s_hi[i][0] - s_lo[i][0]) > 1e-9 * u_mid) break;
    r_trust = probe[i];
    u_trust = u_mid;
  }
  if (r_trust < 2.0) {
    throw Error(ErrorCode::NoBracket, "bracket too wide to trust the outward shot past r=2");
  }

  // Tail amplitude estimate and r_max from the leading decay law.
  const double nu = 0.5 * n - 1.0;
  const double k = 0.5 * (n - 1);
  double amplitude = u_trust / (std::pow(r_trust, -nu) * boost::math::cyl_bessel_k(nu, r_trust));
  const double c_est = amplitude * std::sqrt(std::numbers::pi / 2.0);
  const double target = options.tail_floor * a;
  double r_max = r_trust + 1.0;
  while (r_max < r_cap && c_est * std::pow(r_max, -k) * std::exp(-r_max) >= target) r_max += 0.25;
  r_max = std::min(r_max, r_cap);

  const RadialGrid grid = RadialGrid::graded(r_max, options.grid_nodes, options.grading_length);
  const auto nodes = grid.nodes();
  const std::size_t i_match = grid.cell_of(std::min(r_trust, r_max));
  const double r_match = nodes[i_match];

  std::vector<double> f(nodes.size()), df(nodes.size()), d2f(nodes.size());
  f[0] = a;
  df[0] = 0.0;
  const auto outward = shoot_at(ode, a, nodes.subspan(1, i_match));
  for (std::size_t i = 1; i <= i_match; ++i) {
    f[i] = outward[i - 1][0];
    df[i] = outward[i - 1][1];
  }

  std::vector<double> inward_radii(nodes.rbegin(), nodes.rend() - static_cast<std::ptrdiff_t>(i_match));
  auto mismatch = [&](double amp) { return shoot_inward(ode, amp, inward_radii).back()[0] - f[i_match]; };
  double a0 = amplitude, a1 = amplitude * (1.0 + 1e-3);
  double g0 = mismatch(a0), g1 = mismatch(a1);
  for (int it = 0; it < 50 && g1 != g0; ++it) {
    const double a2 = a1 - g1 * (a1 - a0) / (g1 - g0);
    a0 = a1;
    g0 = g1;
    a1 = a2;
    g1 = mismatch(a1);
    if (std::abs(a1 - a0) <= 1e-15 * std::abs(a1)) break;
  }
  amplitude = a1;
  const auto inward = shoot_inward(ode, amplitude, inward_radii);
  for (std::size_t j = 0; j + 1 < inward.size(); ++j) {
    const std::size_t i = nodes.size() - 1 - j;
    f[i] = inward[j][0];
    df[i] = inward[j][1];
  }
  const double jump = std::abs(inward.back()[1] - df[i_match]) / std::abs(df[i_match]);
  for (std::size_t i = 0; i < nodes.size(); ++i) d2f[i] = ode.second(nodes[i], f[i], df[i]);

  const double decay_c = amplitude * std::sqrt(std::numbers::pi / 2.0);
  RadialFunction U(grid, std::move(f), std::move(df), std::move(d2f), decay_tail(n, decay_c));
  const auto integrals = energy_integrals(U, n, p);

  return GroundState{n,           p,           std::move(U), a,       decay_c, integrals.I1, integrals.I2,
                     integrals.Ip, hi - lo,    r_match,      jump,    options};
}

EnergyIntegrals energy_integrals(const RadialFunction& U, int n, double p) {
  const double omega = sphere_area(n - 1);
  const bool tail = U.has_tail();
  const auto& grid = U.grid();
  auto radial = [&](auto&& integrand) {
    return omega * radial_integral(
                       grid,
                       [&](double r) {
                         const Jet u = U.eval(r);
                         return integrand(u) * std::pow(r, n - 1);
                       },
                       tail);
  };
  EnergyIntegrals out;
  out.I1 = radial([](const Jet& u) { return u.df * u.df; });
  out.I2 = radial([](const Jet& u) { return u.f * u.f; });
  out.Ip = radial([p](const Jet& u) { return std::pow(std::max(u.f, 0.0), p); });
  out.alpha = radial([p](const Jet& u) {
    return 0.5 * u.df * u.df + 0.5 * u.f * u.f - std::pow(std::max(u.f, 0.0), p) / p;
  });
  return out;
}

double decay_constant(const GroundState& gs) {
  const auto nodes = gs.U.grid().nodes();
  const double r_max = gs.r_max();
  const double r_lo = std::max(0.5 * r_max, r_max - 10.0);
  const double k = 0.5 * (gs.n - 1);

  std::vector<double> radii, from_u, from_du;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double r = nodes[i];
    if (r < r_lo) continue;
    const Jet u = gs.U.node(i);
    const double w = std::pow(r, k) * std::exp(r);
    radii.push_back(r);
    from_u.push_back(u.f * w);
    from_du.push_back(-u.df * w);
  }
  if (radii.size() < 4) {
    throw Error(ErrorCode::TailTooShort, "too few nodes in the tail window");
  }
  // c + d/r + e/r^2 removes the algebraic corrections of the Bessel tail.
  Eigen::MatrixXd a(radii.size(), 3);
  Eigen::VectorXd bu(radii.size()), bd(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    a(row, 0) = 1.0;
    a(row, 1) = 1.0 / radii[i];
    a(row, 2) = 1.0 / (radii[i] * radii[i]);
    bu(row) = from_u[i];
    bd(row) = from_du[i];
  }
  const auto qr = a.colPivHouseholderQr();
  const double c_u = qr.solve(bu)(0);
  const double c_du = qr.solve(bd)(0);
  if (!(c_u > 0.0) || !(c_du > 0.0) || std::abs(c_u / c_du - 1.0) >= 0.01) {
    std::ostringstream os;
    os << "decay fits disagree: from U " << c_u << ", from U' " << c_du << " (r_max=" << r_max << ")";
    throw Error(ErrorCode::TailTooShort, os.str());
  }
  return 0.5 * (c_u + c_du);
}

IdentityReport identity_report(const GroundState& gs) {
  const auto in = energy_integrals(gs.U, gs.n, gs.p);
  const double n = gs.n, p = gs.p;
  IdentityReport rep;
  rep.e_energy = std::abs(in.I1 + in.I2 - in.Ip) / in.Ip;
  rep.e_pohozaev = std::abs(0.5 * (n - 2.0) * in.I1 + 0.5 * n * in.I2 - n / p * in.Ip) / in.Ip;
  rep.e_alpha = std::abs(in.alpha - (0.5 - 1.0 / p) * in.Ip) / std::abs(in.alpha);
  return rep;
}

GroundStateAudit audit(const GroundState& gs) {
  const auto nodes = gs.U.grid().nodes();
  GroundStateAudit out;
  out.positive = true;
  out.decreasing = true;
  auto residual = [&](double r, const Jet& u) {
    const double lap = r == 0.0 ? gs.n * u.d2f : u.d2f + (gs.n - 1) * u.df / r;
    return std::abs(lap - u.f + std::pow(u.f, gs.p - 1.0));
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Jet u = gs.U.interpolate(nodes[i]);
    if (!(u.f > 0.0)) out.positive = false;
    if (i > 0 && !(u.df < 0.0)) out.decreasing = false;
    out.max_node_residual = std::max(out.max_node_residual, residual(nodes[i], u));
    if (i + 1 < nodes.size()) {
      const double mid = 0.5 * (nodes[i] + nodes[i + 1]);
      out.max_midpoint_residual = std::max(out.max_midpoint_residual, residual(mid, gs.U.interpolate(mid)));
    }
  }
  return out;
}

GroundState truncate(const GroundState& gs, double r_cut) {
  RadialGrid grid = gs.U.grid().truncated(r_cut);
  const std::size_t count = grid.size();
  auto head = [count](std::span<const double> v) { return std::vector<double>(v.begin(), v.begin() + count); };
  RadialFunction U(std::move(grid), head(gs.U.values()), head(gs.U.first()), head(gs.U.second()),
                   decay_tail(gs.n, gs.decay_c));
  GroundState out{gs.n,  gs.p,  std::move(U),      gs.u0,          gs.decay_c, gs.I1,
                  gs.I2, gs.Ip, gs.bracket_width, gs.match_radius, gs.match_jump, gs.options};
  return out;
}

}  // namespace yamabe
