#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "yamabe/constants.hpp"
#include "yamabe/radial.hpp"

namespace yamabe {

/// Curvature invariants at one point.
struct CurvaturePoint {
  double s = 0.0;      ///< scalar curvature
  double lap_s = 0.0;  ///< Laplace-Beltrami of s
  double ric2 = 0.0;   ///< sum of squared Ricci eigenvalues
  double riem2 = 0.0;  ///< R_ijkl R^ijkl, 2n(n-1) on the unit round S^n
};

CurvaturePoint curvature_round_sphere(int n, double radius);

/// Warp profile f on [0, L] for the metric dt^2 + f(t)^2 g_{S^{n-1}}.
struct WarpProfile {
  std::function<Jet(double)> f;
  double length = 0.0;
  std::string name;
};

/// f = R sin(t/R) on [0, pi R].
WarpProfile round_warp(double radius = 1.0);

/// f = sin t + sum_k coeffs[k] sin^{k+2} t on [0, pi]. Closure holds for any coeffs.
WarpProfile sine_series_warp(std::vector<double> coeffs);

/// Uniformly spaced samples f(t0 + i h), interpolated by a cardinal quintic
/// B-spline with f'(0) = 1, f'(L) = -1 and f'' = 0 at both ends.
WarpProfile tabulated_warp(const std::vector<double>& t, const std::vector<double>& f);

/// Reads "t,f" rows (an optional header line is skipped).
WarpProfile read_warp_csv(const std::filesystem::path& path);

/// Throws InvalidArgument unless f(0) = f(L) = 0, f'(0) = 1, f'(L) = -1 to `tol`
/// and f > 0 inside.
void check_closure(const WarpProfile& w, double tol = 1e-6);

struct RoundSphere {
  int n = 3;
  double radius = 1.0;
};

struct WarpedSphere {
  int n = 3;
  WarpProfile warp;
};

/// Curvature sampled at chart points t (strictly increasing), linear in between.
struct TabulatedChart {
  int n = 3;
  std::vector<double> t;
  std::vector<CurvaturePoint> points;
};

/// Euclidean R^n: zero curvature, no injectivity limit.
struct FlatSpace {
  int n = 3;
};

using ManifoldModel = std::variant<RoundSphere, WarpedSphere, TabulatedChart, FlatSpace>;

int dimension(const ManifoldModel& model);

/// Parameter interval of the meridian (or chart) used for scans.
std::pair<double, double> parameter_range(const ManifoldModel& model);

/// Curvature at the meridian point with parameter t. Throws PoleSingularity at
/// the poles of a warped sphere.
CurvaturePoint curvature_at(const ManifoldModel& model, double t);

CurvaturePoint curvature_warped_sphere(const WarpedSphere& model, double t);

/// Scalar curvature of the warped metric and the sectional curvatures behind it.
struct WarpedSectional {
  double a = 0.0;  ///< radial planes, -f''/f
  double b = 0.0;  ///< spherical planes, (1 - f'^2)/f^2
  double s = 0.0;
};
WarpedSectional warped_sectional(int n, const Jet& f);

/// (1/(120(n+2))) (-c8 lap_s + c6 ric2 - 3 c1 riem2) + c7 s^2 + c9 s
double phi(const CurvaturePoint& cp, const DimensionalConstants& dc);

enum class CriticalKind { Maximum, Minimum, Degenerate };
std::string to_string(CriticalKind kind);

struct CriticalPoint {
  double t = 0.0;
  double phi = 0.0;
  double second = 0.0;  ///< d^2 Phi / dt^2 at t
  CriticalKind kind = CriticalKind::Degenerate;
};

struct ScanSample {
  double t = 0.0;
  CurvaturePoint cp;
  double phi = 0.0;
};

struct PhiScan {
  std::vector<ScanSample> samples;
  std::vector<CriticalPoint> critical;
};

/// Samples Phi at resolution + 1 points of the open parameter range (pole margins
/// of 2% on warped spheres), brackets strict discrete extrema and refines each by
/// Brent minimisation. Throws NoInteriorCritical when Phi is flat or every
/// extremum sits on the scan boundary.
PhiScan scan_phi(const ManifoldModel& model, const DimensionalConstants& dc, int resolution);

/// Same scan without the NoInteriorCritical check (critical list may be empty).
PhiScan sample_phi(const ManifoldModel& model, const DimensionalConstants& dc, int resolution);

std::string scan_csv(const PhiScan& scan);

struct Geodesic {
  double distance = 0.0;
  /// exp_{xi1}^{-1}(xi2) as a tangent vector at xi1 in ambient coordinates.
  std::vector<double> log_map;
};

/// Points are given in R^{n+1} and projected onto the sphere of the model's
/// radius. Throws AntipodalPair when xi2 is within 1e-9 of -xi1.
Geodesic sphere_geodesics(const RoundSphere& model, const std::vector<double>& xi1, const std::vector<double>& xi2);

/// exp_{xi}(v) for a tangent vector v at xi.
std::vector<double> sphere_exp(const RoundSphere& model, const std::vector<double>& xi, const std::vector<double>& v);

}  // namespace yamabe
