#include "yamabe/multipeak.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "yamabe/errors.hpp"
#include "yamabe/quadrature.hpp"

namespace yamabe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Ricci eigenvalue of the isotropic models: (n-1)/R^2 on spheres, 0 when flat.
double ricci_eigenvalue(const ManifoldModel& model) {
  if (const auto* s = std::get_if<RoundSphere>(&model)) return (s->n - 1.0) / (s->radius * s->radius);
  if (std::holds_alternative<FlatSpace>(model)) return 0.0;
  throw Error(ErrorCode::InvalidArgument, "peak sums are built on round spheres and flat space only");
}

double distance(const ManifoldModel& model, const std::vector<double>& a, const std::vector<double>& b) {
  if (const auto* s = std::get_if<RoundSphere>(&model)) {
    const double c = std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0);
    std::vector<double> perp(a.size());
    const double na = norm(a), nb = norm(b);
    for (std::size_t i = 0; i < a.size(); ++i) perp[i] = b[i] / nb - c * a[i] / na;
    return s->radius * std::atan2(norm(perp), c);
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return norm(d);
}

void check_points(const ManifoldModel& model, const PeakConfig& config) {
  const int n = dimension(model);
  const std::size_t dim = std::holds_alternative<FlatSpace>(model) ? n : n + 1;
  for (const auto& c : config.centers) {
    if (c.size() != dim) {
      throw Error(ErrorCode::InvalidArgument, "peak centers need " + std::to_string(dim) + " coordinates");
    }
  }
  if (!(config.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
}

/// Radial measure factor of the model at geodesic distance d.
double area_factor(const ManifoldModel& model, double d) {
  const int n = dimension(model);
  if (const auto* s = std::get_if<RoundSphere>(&model)) {
    return std::pow(s->radius * std::sin(d / s->radius), n - 1);
  }
  return std::pow(d, n - 1);
}

/// (n-1) times the mean curvature of the distance sphere: Lap f(d) = f'' + this * f'.
double drift(const ManifoldModel& model, double d) {
  const int n = dimension(model);
  if (const auto* s = std::get_if<RoundSphere>(&model)) return (n - 1) / (s->radius * std::tan(d / s->radius));
  return (n - 1) / d;
}

std::vector<double> panels(double end, double step, double extra) {
  std::vector<double> x;
  const auto count = static_cast<std::size_t>(std::ceil(end / step));
  for (std::size_t i = 0; i <= count; ++i) x.push_back(std::min(end, step * static_cast<double>(i)));
  if (extra > 0.0 && extra < end) x.push_back(extra);
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  return x;
}

double panel_step(const PeakSum& u, const QuadratureOptions& q) {
  if (q.nodes_per_eps < 8) {
    std::ostringstream os;
    os << "quadrature has " << q.nodes_per_eps << " nodes per eps; at least 8 are needed";
    throw Error(ErrorCode::ResolutionTooCoarse, os.str());
  }
  return 10.0 * u.config.epsilon / q.nodes_per_eps;
}

/// eps^{-n} int f(d) dmu over the support of one peak.
double radial_peak_integral(const PeakSum& u, const QuadratureOptions& q, const ScalarFn& density) {
  const int n = dimension(u.model);
  const double eps = u.config.epsilon;
  const double end = u.profile.support();
  const auto x = panels(end, panel_step(u, q), 0.5 * u.config.cutoff_r);
  const double omega = sphere_area(n - 1);
  return omega / std::pow(eps, n) * integrate_cells(x, [&](double d) { return density(d) * area_factor(u.model, d); });
}

void require_single(const PeakSum& u) {
  if (u.config.K() > 1) {
    throw Error(ErrorCode::InvalidArgument, "this quadrature handles a single peak");
  }
}

/// (a+b)^p - a^p - b^p without cancelling the small cross terms.
double cross_power(double a, double b, double p) {
  a = std::max(a, 0.0);
  b = std::max(b, 0.0);
  if (a < b) std::swap(a, b);
  if (a == 0.0) return 0.0;
  return std::pow(a, p) * std::expm1(p * std::log1p(b / a)) - std::pow(b, p);
}

/// Coordinates of a tangent vector v at the unit point xi in an orthonormal
/// basis of the tangent space built by Gram-Schmidt from the ambient axes.
std::vector<double> tangent_coordinates(const std::vector<double>& xi, const std::vector<double>& v) {
  const std::size_t dim = xi.size();
  std::vector<std::vector<double>> basis{xi};
  for (std::size_t k = 0; k < dim && basis.size() < dim; ++k) {
    std::vector<double> e(dim, 0.0);
    e[k] = 1.0;
    for (const auto& b : basis) {
      const double c = dot(e, b);
      for (std::size_t i = 0; i < dim; ++i) e[i] -= c * b[i];
    }
    const double len = norm(e);
    if (len < 1e-6) continue;
    for (double& x : e) x /= len;
    basis.push_back(e);
  }
  std::vector<double> out;
  for (std::size_t k = 1; k < basis.size(); ++k) out.push_back(dot(v, basis[k]));
  return out;
}

}  // namespace

double cutoff(double d, double cutoff_r) { return cutoff_jet(d, cutoff_r).f; }

Jet cutoff_jet(double d, double cutoff_r) {
  if (!(cutoff_r > 0.0)) throw Error(ErrorCode::InvalidArgument, "cutoff radius must be positive");
  if (std::isinf(cutoff_r) || d <= 0.5 * cutoff_r) return {1.0, 0.0, 0.0};
  if (d >= cutoff_r) return {};
  const double w = 0.5 * cutoff_r;
  const double x = (d - w) / w;
  const double x2 = x * x;
  return {1.0 - x2 * x * (10.0 - 15.0 * x + 6.0 * x2), -30.0 * x2 * (1.0 - x) * (1.0 - x) / w,
          -60.0 * x * (1.0 - x) * (1.0 - 2.0 * x) / (w * w)};
}

PeakForm peak_form(CorrectionForm form) {
  return form == CorrectionForm::Published ? PeakForm::Published : PeakForm::Consistent;
}

double correction_value(const CorrectionProfiles& cp, CorrectionForm form, const std::vector<double>& ric, double s,
                        double c_bold, const std::vector<double>& z) {
  const std::size_t n = z.size();
  if (ric.size() != n * n) throw Error(ErrorCode::InvalidArgument, "Ricci form must be n x n");
  double q = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) q += ric[k * n + l] * z[k] * z[l];
  }
  const double r = norm(z);
  const double psi = cp.psi(r);
  const double v2 = c_bold * s * cp.v2base(r);
  if (form == CorrectionForm::Published) return q * psi / 3.0 + v2;
  const double mean = s / static_cast<double>(n);
  return -((q - mean * r * r) * psi + mean * cp.trace(r)) / 3.0 + v2;
}

PeakProfile::PeakProfile(const GroundState& gs, const CorrectionProfiles* cp, PeakForm form, double epsilon,
                         double cutoff_r, double c_bold, double ricci_scale)
    : gs_(&gs), cp_(cp), form_(form), eps_(epsilon), cutoff_r_(cutoff_r) {
  if (form != PeakForm::None && cp == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "a corrected peak needs correction profiles");
  }
  const double s = gs.n * ricci_scale;
  if (form == PeakForm::Published) {
    a_ = ricci_scale / 3.0;
  } else if (form == PeakForm::Consistent) {
    b_ = -ricci_scale / 3.0;
  }
  if (form != PeakForm::None) c_ = c_bold * s;
}

Jet PeakProfile::correction(double r) const {
  if (form_ == PeakForm::None) return {};
  Jet v{};
  if (a_ != 0.0 && r <= cp_->psi.r_max()) {
    const Jet p = cp_->psi.eval(r);
    v.f += a_ * p.f * r * r;
    v.df += a_ * (p.df * r * r + 2.0 * p.f * r);
    v.d2f += a_ * (p.d2f * r * r + 4.0 * p.df * r + 2.0 * p.f);
  }
  if (b_ != 0.0 && r <= cp_->trace.r_max()) {
    const Jet w = cp_->trace.eval(r);
    v.f += b_ * w.f;
    v.df += b_ * w.df;
    v.d2f += b_ * w.d2f;
  }
  if (c_ != 0.0) {
    const Jet w = cp_->v2base.eval(r);
    v.f += c_ * w.f;
    v.df += c_ * w.df;
    v.d2f += c_ * w.d2f;
  }
  return v;
}

Jet PeakProfile::operator()(double d) const {
  const double r = d / eps_;
  const Jet u = gs_->eval(r);
  const Jet v = correction(r);
  const double e2 = eps_ * eps_;
  const double g = u.f + e2 * v.f;
  const double g1 = (u.df + e2 * v.df) / eps_;
  const double g2 = (u.d2f + e2 * v.d2f) / e2;
  const Jet chi = cutoff_jet(d, cutoff_r_);
  return {g * chi.f, g1 * chi.f + g * chi.df, g2 * chi.f + 2.0 * g1 * chi.df + g * chi.d2f};
}

double PeakProfile::support() const { return std::min(cutoff_r_, eps_ * gs_->r_max()); }

double PeakSum::operator()(const std::vector<double>& x) const {
  double total = 0.0;
  for (const auto& c : config.centers) total += profile(distance(model, c, x)).f;
  return total;
}

double injectivity_radius(const ManifoldModel& model) {
  if (const auto* s = std::get_if<RoundSphere>(&model)) return std::numbers::pi * s->radius;
  if (std::holds_alternative<FlatSpace>(model)) return kInf;
  throw Error(ErrorCode::InvalidArgument, "injectivity radius is only known for round spheres and flat space");
}

namespace {

void check_cutoff(const ManifoldModel& model, double cutoff_r) {
  const double inj = injectivity_radius(model);
  if (!(cutoff_r > 0.0) || (std::isfinite(inj) && !(cutoff_r < inj))) {
    std::ostringstream os;
    os << "cutoff radius " << cutoff_r << " must lie below the injectivity radius " << inj;
    throw Error(ErrorCode::InjectivityViolation, os.str());
  }
}

}  // namespace

PeakSum build_W(const GroundState& gs, double epsilon, const std::vector<double>& xi, const ManifoldModel& model,
                double cutoff_r, double c_bold) {
  check_cutoff(model, cutoff_r);
  PeakConfig config{epsilon, {xi}, cutoff_r};
  check_points(model, config);
  PeakProfile profile(gs, nullptr, PeakForm::None, epsilon, cutoff_r, c_bold, ricci_eigenvalue(model));
  return PeakSum{model, std::move(config), profile, c_bold, gs.p};
}

PeakSum build_Y(const GroundState& gs, const CorrectionProfiles& cp, const DimensionalConstants& dc,
                const PeakConfig& config, const ManifoldModel& model, CorrectionForm form) {
  check_cutoff(model, config.cutoff_r);
  check_points(model, config);
  PeakProfile profile(gs, &cp, peak_form(form), config.epsilon, config.cutoff_r, dc.c_bold,
                      ricci_eigenvalue(model));
  return PeakSum{model, config, profile, dc.c_bold, dc.p};
}

Admissibility admissible(const PeakConfig& config, const GroundState& gs, const RoundSphere& model, double rho,
                         const std::vector<double>& xi0) {
  const ManifoldModel m = model;
  Admissibility a;
  a.within_rho = true;
  for (const auto& c : config.centers) {
    if (!(distance(m, xi0, c) < rho)) a.within_rho = false;
  }
  for (std::size_t i = 0; i < config.centers.size(); ++i) {
    for (std::size_t j = 0; j < config.centers.size(); ++j) {
      if (i == j) continue;
      a.interaction_sum += gs.eval(distance(m, config.centers[i], config.centers[j]) / config.epsilon).f;
    }
  }
  const double e4 = std::pow(config.epsilon, 4);
  a.margin = e4 - a.interaction_sum;
  a.admissible = a.within_rho && a.interaction_sum < e4;
  return a;
}

double inverse_profile(const GroundState& gs, double value) {
  if (!(value > 0.0) || !(value < gs.u0)) {
    throw Error(ErrorCode::InvalidArgument, "profile value must lie in (0, u0)");
  }
  double lo = 0.0, hi = gs.r_max();
  while (gs.eval(hi).f > value) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gs.eval(mid).f > value ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double norm_eps(const PeakSum& u, const QuadratureOptions& q) {
  require_single(u);
  if (u.config.K() == 0) return 0.0;
  const double eps = u.config.epsilon;
  const double s = dimension(u.model) * ricci_eigenvalue(u.model);
  return radial_peak_integral(u, q, [&](double d) {
    const Jet v = u.profile(d);
    return eps * eps * v.df * v.df + (1.0 + eps * eps * u.c_bold * s) * v.f * v.f;
  });
}

namespace {

double single_energy(const PeakSum& u, const QuadratureOptions& q) {
  const double eps = u.config.epsilon;
  const double s = dimension(u.model) * ricci_eigenvalue(u.model);
  const double p = u.p;
  return radial_peak_integral(u, q, [&](double d) {
    const Jet v = u.profile(d);
    return 0.5 * eps * eps * v.df * v.df + 0.5 * (1.0 + u.c_bold * s * eps * eps) * v.f * v.f -
           std::pow(std::max(v.f, 0.0), p) / p;
  });
}

}  // namespace

double energy_J(const PeakSum& u, const QuadratureOptions& q) {
  if (u.config.K() == 1) return single_energy(u, q);
  if (u.config.K() == 2) {
    PeakSum one = u;
    one.config.centers = {u.config.centers[0]};
    const double j1 = single_energy(one, q);
    one.config.centers = {u.config.centers[1]};
    const double j2 = single_energy(one, q);
    return j1 + j2 + interaction_energy(u, q);
  }
  if (u.config.K() == 0) return 0.0;
  throw Error(ErrorCode::InvalidArgument, "energy quadrature handles K = 1 or 2");
}

double residual_norm(const PeakSum& u, const QuadratureOptions& q) {
  require_single(u);
  if (u.config.K() == 0) return 0.0;
  const double eps = u.config.epsilon;
  const double s = dimension(u.model) * ricci_eigenvalue(u.model);
  const double p = u.p;
  const double dual = p / (p - 1.0);
  const double integral = radial_peak_integral(u, q, [&](double d) {
    const Jet v = u.profile(d);
    const double lap = v.d2f + drift(u.model, d) * v.df;
    const double r = -eps * eps * lap + (1.0 + u.c_bold * s * eps * eps) * v.f - std::pow(std::max(v.f, 0.0), p - 1.0);
    return std::pow(std::abs(r), dual);
  });
  return std::pow(integral, 1.0 / dual);
}

double interaction_energy(const PeakSum& u, const QuadratureOptions& q) {
  const auto* sphere = std::get_if<RoundSphere>(&u.model);
  if (sphere == nullptr || u.config.K() != 2) {
    throw Error(ErrorCode::InvalidArgument, "the interaction quadrature needs two peaks on a round sphere");
  }
  const int n = sphere->n;
  const double R = sphere->radius;
  const double eps = u.config.epsilon;
  const double p = u.p;
  const double s = n * ricci_eigenvalue(u.model);
  const double sep = distance(u.model, u.config.centers[0], u.config.centers[1]);
  if (!(sep > 0.0)) throw Error(ErrorCode::InvalidArgument, "the two peaks coincide");
  const double half = 0.5 * sep / R;
  const double cos_sep = std::cos(2.0 * half);

  // Frame: e0 through the midpoint, e1 along the chord; theta from e0, phi from e1.
  // Swapping the peaks maps phi to pi - phi, so [0, pi/2] is integrated twice.
  const double step = panel_step(u, q);
  // u1 u2 < e^{-40} u0^2 once d1 + d2 > sep + 40 eps.
  const double theta_max =
      std::min(std::numbers::pi, std::min(u.profile.support() + 0.5 * sep, sep + 20.0 * eps) / R);
  const auto theta = panels(theta_max, step / R, half);
  const double phi_step = std::min(std::numbers::pi / 16.0, step / (R * std::max(std::sin(half), 1e-12)));
  const auto phi = panels(0.5 * std::numbers::pi, phi_step, 0.0);

  auto density = [&](double th, double ph) {
    const double ct = std::cos(th), st = std::sin(th), cp = std::cos(ph);
    const double c1 = std::clamp(ct * std::cos(half) + st * cp * std::sin(half), -1.0, 1.0);
    const double c2 = std::clamp(ct * std::cos(half) - st * cp * std::sin(half), -1.0, 1.0);
    const double a1 = std::acos(c1), a2 = std::acos(c2);
    const Jet u1 = u.profile(R * a1), u2 = u.profile(R * a2);
    if (u1.f == 0.0 && u2.f == 0.0) return 0.0;
    const double s1 = std::sin(a1), s2 = std::sin(a2);
    const double grad = (s1 > 0.0 && s2 > 0.0) ? (cos_sep - c1 * c2) / (s1 * s2) : 0.0;
    const double f = eps * eps * u1.df * u2.df * grad + (1.0 + u.c_bold * s * eps * eps) * u1.f * u2.f -
                     cross_power(u1.f, u2.f, p) / p;
    return f * std::pow(st, n - 1) * std::pow(std::sin(ph), n - 2);
  };
  const double outer = integrate_cells(theta, [&](double th) {
    return integrate_cells(phi, [&](double ph) { return density(th, ph); });
  });
  return 2.0 * sphere_area(n - 2) * std::pow(R, n) * outer / std::pow(eps, n);
}

EnergyBreakdown expansion_compare(const PeakConfig& config, const ManifoldModel& model,
                                  const DimensionalConstants& dc, const GroundState& gs,
                                  const CorrectionProfiles& cp, CorrectionForm form, const QuadratureOptions& q,
                                  std::optional<double> gamma_value) {
  const auto* sphere = std::get_if<RoundSphere>(&model);
  if (sphere == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "the expansion comparison runs on round spheres");
  }
  const PeakSum y = build_Y(gs, cp, dc, config, model, form);
  const double eps = config.epsilon;
  const int K = config.K();

  EnergyBreakdown out;
  out.epsilon = eps;
  out.K = K;
  out.J_measured = energy_J(y, q);
  double sum_s = 0.0, sum_phi = 0.0;
  for (int i = 0; i < K; ++i) {
    const CurvaturePoint c = curvature_at(model, 0.0);
    sum_s += c.s;
    sum_phi += phi(c, dc);
  }
  out.term_alpha = K * dc.alpha;
  out.term_beta = eps * eps * 0.5 * dc.beta * sum_s;
  out.term_phi = std::pow(eps, 4) * sum_phi;

  double interaction = 0.0, u_sum = 0.0;
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      if (i == j) continue;
      const auto geo = sphere_geodesics(*sphere, config.centers[i], config.centers[j]);
      const double u = gs.eval(geo.distance / eps).f;
      u_sum += u;
      double g;
      if (gamma_value) {
        g = *gamma_value;
      } else {
        std::vector<double> unit = config.centers[i];
        const double nu = norm(unit);
        for (double& x : unit) x /= nu;
        std::vector<double> b = tangent_coordinates(unit, geo.log_map);
        const double nb = norm(b);
        for (double& x : b) x /= nb;
        g = gamma(gs, b).value;
      }
      interaction += g * u;
    }
  }
  out.term_interaction = -0.5 * interaction;
  out.admissible = u_sum < std::pow(eps, 4);
  out.remainder = out.J_measured - (out.term_alpha + out.term_beta + out.term_phi + out.term_interaction);
  return out;
}

std::vector<double> energy_fit(const GroundState& gs, const CorrectionProfiles& cp, const DimensionalConstants& dc,
                               const RoundSphere& sphere, const std::vector<double>& eps, double cutoff_r,
                               std::optional<CorrectionForm> form, int max_order, const QuadratureOptions& q) {
  std::vector<double> values;
  values.reserve(eps.size());
  const ManifoldModel model = sphere;
  for (double e : eps) {
    PeakConfig config{e, {north_pole(sphere.n)}, cutoff_r};
    const PeakSum u = form ? build_Y(gs, cp, dc, config, model, *form)
                           : build_W(gs, e, config.centers[0], model, cutoff_r, dc.c_bold);
    values.push_back(energy_J(u, q));
  }
  return fit_even_polynomial(eps, values, max_order);
}

SphereFourthOrder sphere_fourth_order(const GroundState& gs, const CorrectionProfiles& cp,
                                      const DimensionalConstants& dc, double radius, CorrectionForm form) {
  const int n = gs.n;
  const double p = gs.p;
  const double lambda = (n - 1.0) / (radius * radius);
  const double s = n * lambda;
  const double c = dc.c_bold;
  const double omega = sphere_area(n - 1);
  const auto& grid = gs.U.grid();
  auto integral = [&](const ScalarFn& f) {
    return omega * radial_integral(
                       grid, [&](double r) { return f(r) * std::pow(r, n - 1); }, false);
  };
  const double f_r4 = integral([&](double r) {
    const Jet u = gs.eval(r);
    return (0.5 * u.df * u.df + 0.5 * u.f * u.f - std::pow(u.f, p) / p) * std::pow(r, 4);
  });
  const double u2_r2 = integral([&](double r) { return std::pow(gs.eval(r).f * r, 2); });

  SphereFourthOrder out;
  out.w4 = (n - 1.0) * (5.0 * n - 7.0) / (360.0 * std::pow(radius, 4)) * f_r4 - c * s * lambda / 12.0 * u2_r2;

  const PeakProfile profile(gs, &cp, peak_form(form), 1.0, kInf, c, lambda);
  const double linear = integral([&](double r) {
    const Jet u = gs.eval(r);
    return (lambda / 3.0 * r * u.df + c * s * u.f) * profile.correction(r).f;
  });
  const double quadratic = integral([&](double r) {
    const Jet v = profile.correction(r);
    const double u = gs.eval(r).f;
    const double l0v = -v.d2f - (n - 1) * v.df / r + (1.0 - (p - 1.0) * std::pow(u, p - 2.0)) * v.f;
    return v.f * l0v;
  });
  out.y4 = out.w4 + linear + 0.5 * quadratic;
  return out;
}

std::vector<std::vector<double>> symmetric_pair(const RoundSphere& sphere, double distance_between) {
  const double half = 0.5 * distance_between / sphere.radius;
  std::vector<double> a(static_cast<std::size_t>(sphere.n) + 1, 0.0), b = a;
  a[0] = b[0] = sphere.radius * std::cos(half);
  a[1] = sphere.radius * std::sin(half);
  b[1] = -a[1];
  return {a, b};
}

std::vector<double> north_pole(int n) {
  std::vector<double> x(static_cast<std::size_t>(n) + 1, 0.0);
  x[0] = 1.0;
  return x;
}

}  // namespace yamabe
