#pragma once

#include <optional>
#include <vector>

#include "yamabe/constants.hpp"
#include "yamabe/correction.hpp"
#include "yamabe/fitting.hpp"
#include "yamabe/geometry.hpp"

namespace yamabe {

/// Quintic smoothstep: 1 on [0, r/2], 0 on [r, inf), C2 in between.
double cutoff(double d, double cutoff_r);
/// cutoff and its first two derivatives in d.
Jet cutoff_jet(double d, double cutoff_r);

/// Peaks on a round sphere (ambient coordinates in R^{n+1}) or in flat R^n.
struct PeakConfig {
  double epsilon = 0.1;
  std::vector<std::vector<double>> centers;
  double cutoff_r = 1.0;
  int K() const { return static_cast<int>(centers.size()); }
};

/// Which correction rides on each peak. None gives W.
enum class PeakForm { None, Published, Consistent };
PeakForm peak_form(CorrectionForm form);

/// The correction in normal coordinates z (already divided by eps) about a point
/// with Ricci form `ric` (n x n, row-major) and scalar curvature s.
double correction_value(const CorrectionProfiles& cp, CorrectionForm form, const std::vector<double>& ric, double s,
                        double c_bold, const std::vector<double>& z);

/// One peak as a function of geodesic distance d:
/// [U(d/eps) + eps^2 V(d/eps)] chi(d), with V radial because the model is isotropic.
class PeakProfile {
 public:
  PeakProfile(const GroundState& gs, const CorrectionProfiles* cp, PeakForm form, double epsilon, double cutoff_r,
              double c_bold, double ricci_scale);

  /// Value and d-derivatives at geodesic distance d.
  Jet operator()(double d) const;
  /// V(r) and its r-derivatives (zero for W).
  Jet correction(double r) const;

  double epsilon() const { return eps_; }
  double cutoff_r() const { return cutoff_r_; }
  /// Beyond this distance the profile is below 1e-13 u0 or cut off.
  double support() const;

 private:
  const GroundState* gs_;
  const CorrectionProfiles* cp_;
  PeakForm form_;
  double eps_;
  double cutoff_r_;
  double a_ = 0.0;  ///< coefficient of psi r^2
  double b_ = 0.0;  ///< coefficient of w
  double c_ = 0.0;  ///< coefficient of v2base
};

/// Sum of identical peaks on a model; evaluation at points of the model.
struct PeakSum {
  ManifoldModel model;
  PeakConfig config;
  PeakProfile profile;
  double c_bold = 0.0;
  double p = 0.0;

  /// Point in ambient R^{n+1} on the sphere, or in R^n for flat space.
  double operator()(const std::vector<double>& x) const;
};

double injectivity_radius(const ManifoldModel& model);

/// W_{eps, xi}. Throws InjectivityViolation if cutoff_r reaches the injectivity radius.
PeakSum build_W(const GroundState& gs, double epsilon, const std::vector<double>& xi, const ManifoldModel& model,
                double cutoff_r, double c_bold);

/// sum_i (W_i + eps^2 V_i) for the chosen correction.
PeakSum build_Y(const GroundState& gs, const CorrectionProfiles& cp, const DimensionalConstants& dc,
                const PeakConfig& config, const ManifoldModel& model, CorrectionForm form);

struct Admissibility {
  bool admissible = false;
  bool within_rho = false;
  /// sum_{i != j} U(d_ij / eps)
  double interaction_sum = 0.0;
  /// eps^4 - interaction_sum (positive when the strict inequality holds)
  double margin = 0.0;
};
Admissibility admissible(const PeakConfig& config, const GroundState& gs, const RoundSphere& model, double rho,
                         const std::vector<double>& xi0);

/// r with U(r) = value, by bisection on the profile (value below u0).
double inverse_profile(const GroundState& gs, double value);

struct QuadratureOptions {
  /// Gauss nodes per length eps along each direction.
  int nodes_per_eps = 160;
};

/// eps^{-n} (eps^2 int |grad u|^2 + int (1 + eps^2 c s) u^2)
double norm_eps(const PeakSum& u, const QuadratureOptions& q = {});

/// eps^{-n} int (eps^2/2 |grad u|^2 + (1 + c s eps^2) u^2 / 2 - (u^+)^p / p)
double energy_J(const PeakSum& u, const QuadratureOptions& q = {});

/// (eps^{-n} int |r|^{p'})^{1/p'} with r = -eps^2 Lap u + (1 + c s eps^2) u - (u^+)^{p-1}.
double residual_norm(const PeakSum& u, const QuadratureOptions& q = {});

/// J(u1 + u2) - J(u1) - J(u2) for a two-peak sum on the sphere.
double interaction_energy(const PeakSum& u, const QuadratureOptions& q = {});

struct EnergyBreakdown {
  double epsilon = 0.0;
  int K = 0;
  double J_measured = 0.0;
  double term_alpha = 0.0;
  double term_beta = 0.0;
  double term_phi = 0.0;
  double term_interaction = 0.0;
  double remainder = 0.0;
  bool admissible = true;
};

/// J(Y) against K alpha + eps^2 (beta/2) sum s + eps^4 sum Phi - (1/2) sum gamma U(d/eps).
EnergyBreakdown expansion_compare(const PeakConfig& config, const ManifoldModel& model,
                                  const DimensionalConstants& dc, const GroundState& gs,
                                  const CorrectionProfiles& cp, CorrectionForm form = CorrectionForm::Consistent,
                                  const QuadratureOptions& q = {}, std::optional<double> gamma_value = {});

/// Coefficients a_k of the fit sum_k a_k eps^{2k} to J(Y) (or J(W) when form is
/// empty) for one peak on the round sphere.
std::vector<double> energy_fit(const GroundState& gs, const CorrectionProfiles& cp, const DimensionalConstants& dc,
                               const RoundSphere& sphere, const std::vector<double>& eps, double cutoff_r,
                               std::optional<CorrectionForm> form, int max_order = 3,
                               const QuadratureOptions& q = {});

/// eps^4 coefficient of J for one peak on the round sphere of radius R computed
/// from the flat profiles: w4 for W, y4 for W + eps^2 V.
struct SphereFourthOrder {
  double w4 = 0.0;
  double y4 = 0.0;
};
SphereFourthOrder sphere_fourth_order(const GroundState& gs, const CorrectionProfiles& cp,
                                      const DimensionalConstants& dc, double radius, CorrectionForm form);

/// Centers on the round sphere at geodesic distance `distance`, symmetric about
/// the north pole e_0 in the (e_0, e_1) plane.
std::vector<std::vector<double>> symmetric_pair(const RoundSphere& sphere, double distance);
std::vector<double> north_pole(int n);

}  // namespace yamabe
