#include "yamabe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>
#include <boost/math/tools/minima.hpp>

#include "yamabe/errors.hpp"
#include "yamabe/serialize.hpp"

namespace yamabe {

namespace {

constexpr double kPoleTolerance = 1e-6;
constexpr double kScanMargin = 0.02;

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

/// Sixth-order central differences: first and second derivative of g at t.
std::pair<double, double> central_derivatives(const std::function<double(double)>& g, double t, double h) {
  const double f0 = g(t);
  const double p1 = g(t + h), m1 = g(t - h);
  const double p2 = g(t + 2 * h), m2 = g(t - 2 * h);
  const double p3 = g(t + 3 * h), m3 = g(t - 3 * h);
  const double d1 = (45.0 * (p1 - m1) - 9.0 * (p2 - m2) + (p3 - m3)) / (60.0 * h);
  const double d2 = (270.0 * (p1 + m1) - 27.0 * (p2 + m2) + 2.0 * (p3 + m3) - 490.0 * f0) / (180.0 * h * h);
  return {d1, d2};
}

CurvaturePoint interpolate_chart(const TabulatedChart& chart, double t) {
  const auto& ts = chart.t;
  if (t < ts.front() || t > ts.back()) {
    throw Error(ErrorCode::InvalidArgument, "parameter outside the tabulated chart");
  }
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t i = static_cast<std::size_t>(it - ts.begin());
  if (i == ts.size()) i = ts.size() - 1;
  if (i == 0) i = 1;
  const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
  const auto& a = chart.points[i - 1];
  const auto& b = chart.points[i];
  auto lerp = [w](double x, double y) { return (1.0 - w) * x + w * y; };
  return {lerp(a.s, b.s), lerp(a.lap_s, b.lap_s), lerp(a.ric2, b.ric2), lerp(a.riem2, b.riem2)};
}

void check_dims(const ManifoldModel& model, const DimensionalConstants& dc) {
  if (dimension(model) != dc.n) {
    std::ostringstream os;
    os << "constants for n=" << dc.n << " used on a model of dimension " << dimension(model);
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

}  // namespace

CurvaturePoint curvature_round_sphere(int n, double radius) {
  if (n < 2 || !(radius > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "round sphere needs n >= 2 and radius > 0");
  }
  const double r2 = radius * radius;
  return {n * (n - 1.0) / r2, 0.0, n * (n - 1.0) * (n - 1.0) / (r2 * r2), 2.0 * n * (n - 1.0) / (r2 * r2)};
}

WarpProfile round_warp(double radius) {
  return {[radius](double t) {
            const double x = t / radius;
            return Jet{radius * std::sin(x), std::cos(x), -std::sin(x) / radius};
          },
          std::numbers::pi * radius, "round"};
}

WarpProfile sine_series_warp(std::vector<double> coeffs) {
  auto f = [coeffs](double t) {
    const double s = std::sin(t), c = std::cos(t);
    Jet j{s, c, -s};
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const double k = static_cast<double>(i + 2);
      const double sk2 = std::pow(s, k - 2.0);
      j.f += coeffs[i] * sk2 * s * s;
      j.df += coeffs[i] * k * sk2 * s * c;
      j.d2f += coeffs[i] * (k * (k - 1.0) * sk2 * c * c - k * sk2 * s * s);
    }
    return j;
  };
  std::ostringstream name;
  name << "sine-series";
  for (double c : coeffs) name << ':' << format_number(c);
  return {f, std::numbers::pi, name.str()};
}

WarpProfile tabulated_warp(const std::vector<double>& t, const std::vector<double>& f) {
  if (t.size() != f.size() || t.size() < 8) {
    throw Error(ErrorCode::InvalidArgument, "tabulated warp needs at least 8 (t, f) samples");
  }
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i] - (t.front() + h * static_cast<double>(i))) > 1e-9 * (1.0 + std::abs(t.back()))) {
      throw Error(ErrorCode::InvalidArgument, "tabulated warp samples must be uniformly spaced in t");
    }
  }
  if (std::abs(t.front()) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "tabulated warp must start at t = 0");
  }
  auto spline = std::make_shared<boost::math::interpolators::cardinal_quintic_b_spline<double>>(
      f, t.front(), h, std::pair{1.0, 0.0}, std::pair{-1.0, 0.0});
  const double length = t.back();
  WarpProfile w{[spline, length](double x) {
                  x = std::clamp(x, 0.0, length);
                  return Jet{(*spline)(x), spline->prime(x), spline->double_prime(x)};
                },
                length, "tabulated"};
  check_closure(w, 1e-6 + 10.0 * h * h * h * h);
  return w;
}

WarpProfile read_warp_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open warp profile " + path.string());
  std::vector<double> t, f;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a, b;
    if (!(row >> a >> b)) {
      if (t.empty() && line_no == 1) continue;
      throw Error(ErrorCode::Io, "malformed row " + std::to_string(line_no) + " in " + path.string());
    }
    t.push_back(a);
    f.push_back(b);
  }
  WarpProfile w = tabulated_warp(t, f);
  w.name = path.filename().string();
  return w;
}

void check_closure(const WarpProfile& w, double tol) {
  const Jet a = w.f(0.0), b = w.f(w.length);
  if (std::abs(a.f) > tol || std::abs(b.f) > tol || std::abs(a.df - 1.0) > tol || std::abs(b.df + 1.0) > tol) {
    std::ostringstream os;
    os << "warp profile fails closure: f(0)=" << a.f << " f(L)=" << b.f << " f'(0)=" << a.df << " f'(L)=" << b.df;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  for (int i = 1; i < 64; ++i) {
    if (!(w.f(w.length * i / 64.0).f > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "warp profile must be positive inside (0, L)");
    }
  }
}

int dimension(const ManifoldModel& model) {
  return std::visit([](const auto& m) { return m.n; }, model);
}

std::pair<double, double> parameter_range(const ManifoldModel& model) {
  if (const auto* r = std::get_if<RoundSphere>(&model)) return {0.0, std::numbers::pi * r->radius};
  if (const auto* w = std::get_if<WarpedSphere>(&model)) return {0.0, w->warp.length};
  if (std::holds_alternative<FlatSpace>(model)) return {0.0, 1.0};
  const auto& c = std::get<TabulatedChart>(model);
  return {c.t.front(), c.t.back()};
}

WarpedSectional warped_sectional(int n, const Jet& f) {
  WarpedSectional out;
  out.a = -f.d2f / f.f;
  out.b = (1.0 - f.df * f.df) / (f.f * f.f);
  out.s = 2.0 * (n - 1) * out.a + (n - 1.0) * (n - 2.0) * out.b;
  return out;
}

CurvaturePoint curvature_warped_sphere(const WarpedSphere& model, double t) {
  const double length = model.warp.length;
  const double gap = std::min(t, length - t);
  if (!(gap > kPoleTolerance * length)) {
    std::ostringstream os;
    os << "t=" << t << " is at a pole of the warped sphere (L=" << length << ")";
    throw Error(ErrorCode::PoleSingularity, os.str());
  }
  const int n = model.n;
  const Jet f = model.warp.f(t);
  const WarpedSectional k = warped_sectional(n, f);
  const double ric_radial = (n - 1) * k.a;
  const double ric_sphere = k.a + (n - 2) * k.b;

  CurvaturePoint cp;
  cp.s = k.s;
  cp.ric2 = ric_radial * ric_radial + (n - 1) * ric_sphere * ric_sphere;
  cp.riem2 = 4.0 * (n - 1) * k.a * k.a + 2.0 * (n - 1.0) * (n - 2.0) * k.b * k.b;
  const double h = std::min(5e-3 * length / std::numbers::pi, gap / 4.0);
  const auto [ds, d2s] =
      central_derivatives([&](double x) { return warped_sectional(n, model.warp.f(x)).s; }, t, h);
  cp.lap_s = d2s + (n - 1) * (f.df / f.f) * ds;
  return cp;
}

CurvaturePoint curvature_at(const ManifoldModel& model, double t) {
  if (const auto* r = std::get_if<RoundSphere>(&model)) return curvature_round_sphere(r->n, r->radius);
  if (const auto* w = std::get_if<WarpedSphere>(&model)) return curvature_warped_sphere(*w, t);
  if (std::holds_alternative<FlatSpace>(model)) return {};
  return interpolate_chart(std::get<TabulatedChart>(model), t);
}

double phi(const CurvaturePoint& cp, const DimensionalConstants& dc) {
  return (-dc.c8 * cp.lap_s + dc.c6 * cp.ric2 - 3.0 * dc.c1 * cp.riem2) / (120.0 * (dc.n + 2.0)) +
         dc.c7 * cp.s * cp.s + dc.c9 * cp.s;
}

std::string to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::Maximum: return "max";
    case CriticalKind::Minimum: return "min";
    case CriticalKind::Degenerate: return "degenerate";
  }
  return "degenerate";
}

PhiScan sample_phi(const ManifoldModel& model, const DimensionalConstants& dc, int resolution) {
  if (resolution < 4) throw Error(ErrorCode::InvalidArgument, "scan resolution must be at least 4");
  check_dims(model, dc);
  auto [lo, hi] = parameter_range(model);
  if (!std::holds_alternative<TabulatedChart>(model)) {
    const double span = hi - lo;
    lo += kScanMargin * span;
    hi -= kScanMargin * span;
  }
  const std::function<double(double)> value = [&](double t) { return phi(curvature_at(model, t), dc); };

  PhiScan scan;
  scan.samples.reserve(static_cast<std::size_t>(resolution) + 1);
  for (int i = 0; i <= resolution; ++i) {
    const double t = i == resolution ? hi : lo + (hi - lo) * i / resolution;
    const CurvaturePoint cp = curvature_at(model, t);
    scan.samples.push_back({t, cp, phi(cp, dc)});
  }

  double top = -INFINITY, bottom = INFINITY;
  for (const auto& s : scan.samples) {
    top = std::max(top, s.phi);
    bottom = std::min(bottom, s.phi);
  }
  const double scale = std::max({1.0, std::abs(top), std::abs(bottom)});
  if (top - bottom <= 1e-12 * scale) return scan;

  const auto& v = scan.samples;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const bool is_max = v[i].phi > v[i - 1].phi && v[i].phi >= v[i + 1].phi;
    const bool is_min = v[i].phi < v[i - 1].phi && v[i].phi <= v[i + 1].phi;
    if (!is_max && !is_min) continue;
    const double sign = is_max ? -1.0 : 1.0;
    const auto best = boost::math::tools::brent_find_minima([&](double t) { return sign * value(t); }, v[i - 1].t,
                                                            v[i + 1].t, std::numeric_limits<double>::digits);
    // Brent stops near sqrt(eps) in t; Newton on a difference derivative of Phi
    // takes the location down to roundoff.
    double t = best.first;
    const double hd = 1e-3 * (hi - lo);
    for (int it = 0; it < 8; ++it) {
      const auto [d1, d2] = central_derivatives(value, t, hd);
      if (!(std::abs(d2) > 0.0)) break;
      const double next = t - d1 / d2;
      if (!(next > v[i - 1].t && next < v[i + 1].t)) break;
      const bool done = std::abs(next - t) < 1e-14 * (hi - lo);
      t = next;
      if (done) break;
    }
    CriticalPoint c;
    c.t = t;
    c.phi = value(c.t);
    const double h = 1e-3 * (hi - lo);
    c.second = (value(c.t + h) - 2.0 * c.phi + value(c.t - h)) / (h * h);
    if (std::abs(c.second) * h * h <= 1e-10 * scale) {
      c.kind = CriticalKind::Degenerate;
    } else {
      c.kind = c.second < 0.0 ? CriticalKind::Maximum : CriticalKind::Minimum;
    }
    scan.critical.push_back(c);
  }
  return scan;
}

PhiScan scan_phi(const ManifoldModel& model, const DimensionalConstants& dc, int resolution) {
  PhiScan scan = sample_phi(model, dc, resolution);
  if (scan.critical.empty()) {
    throw Error(ErrorCode::NoInteriorCritical,
                "Phi has no isolated interior critical point on the scanned range (flat or monotone)");
  }
  return scan;
}

std::string scan_csv(const PhiScan& scan) {
  std::ostringstream os;
  os << "t,s,lap_s,ric2,riem2,phi\n";
  for (const auto& s : scan.samples) {
    os << format_number(s.t) << ',' << format_number(s.cp.s) << ',' << format_number(s.cp.lap_s) << ','
       << format_number(s.cp.ric2) << ',' << format_number(s.cp.riem2) << ',' << format_number(s.phi) << '\n';
  }
  return os.str();
}

Geodesic sphere_geodesics(const RoundSphere& model, const std::vector<double>& xi1, const std::vector<double>& xi2) {
  const std::size_t dim = static_cast<std::size_t>(model.n) + 1;
  if (xi1.size() != dim || xi2.size() != dim) {
    throw Error(ErrorCode::InvalidArgument, "sphere points need n+1 ambient coordinates");
  }
  const double n1 = norm(xi1), n2 = norm(xi2);
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "sphere points must be nonzero");
  std::vector<double> a(dim), b(dim), sum(dim), perp(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    a[i] = xi1[i] / n1;
    b[i] = xi2[i] / n2;
    sum[i] = a[i] + b[i];
  }
  if (norm(sum) < 1e-9) throw Error(ErrorCode::AntipodalPair, "points are antipodal; the log map is undefined");
  const double c = dot(a, b);
  for (std::size_t i = 0; i < dim; ++i) perp[i] = b[i] - c * a[i];
  const double s = norm(perp);
  const double angle = std::atan2(s, c);
  Geodesic g;
  g.distance = model.radius * angle;
  g.log_map.assign(dim, 0.0);
  if (s > 0.0) {
    for (std::size_t i = 0; i < dim; ++i) g.log_map[i] = g.distance * perp[i] / s;
  }
  return g;
}

std::vector<double> sphere_exp(const RoundSphere& model, const std::vector<double>& xi, const std::vector<double>& v) {
  const double nx = norm(xi);
  const double len = norm(v);
  const double angle = len / model.radius;
  std::vector<double> out(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const double unit = xi[i] / nx;
    out[i] = model.radius * (std::cos(angle) * unit + (len > 0.0 ? std::sin(angle) * v[i] / len : 0.0));
  }
  return out;
}

}  // namespace yamabe
