#pragma once

#include <string>
#include <utility>
#include <vector>

#include "yamabe/correction.hpp"
#include "yamabe/groundstate.hpp"

namespace yamabe {

/// Raw integrals over R^n behind the constants, kept for audit.
struct RawIntegrals {
  double I1 = 0.0;
  double I2 = 0.0;
  double Ip = 0.0;
  double M2 = 0.0;     ///< int U^2 z1^2
  double M4 = 0.0;     ///< int (U'/r)^2 z1^4
  double G2 = 0.0;     ///< int |grad U|^2 |z|^2
  double PsiU4 = 0.0;  ///< int psi (U'/r) z1^4
  double UPsi2 = 0.0;  ///< int U psi z1^2
  double Q2 = 0.0;     ///< int (U'^2/2 - U U' / ((2-p) r)) z1^2
  double UV2 = 0.0;    ///< int U v2base
};

struct DimensionalConstants {
  int n = 0;
  int m = 0;
  int N = 0;
  double p = 0.0;
  double c_bold = 0.0;
  double alpha = 0.0;
  /// c I2 - G2 / (n(n+2))
  double beta = 0.0;
  /// c I2 - 2 c1, the same number through the fourth-moment identity.
  double beta_check = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 0.0, c7 = 0.0, c8 = 0.0, c9 = 0.0;
  RawIntegrals raw;
};

/// (N-2) / (4(N-1))
double c_bold(int N);

/// Throws ExponentMismatch unless gs.p is the product exponent for (gs.n, m).
DimensionalConstants compute_constants(const GroundState& gs, const CorrectionProfiles& cp, int m);

/// Solves the ground state and corrections for p = p_{n+m} first.
DimensionalConstants compute_constants(int n, int m, const GroundStateOptions& options = {});

struct GammaValue {
  std::vector<double> b;
  double value = 0.0;
};

/// int U^{p-1}(z) e^{<b,z>} dz for a unit vector b in R^n.
GammaValue gamma(const GroundState& gs, const std::vector<double>& b);

/// The same integral with b = 0, i.e. int U^{p-1}.
double gamma_zero(const GroundState& gs);

/// Pairs (n, m) with n, m >= 3 and n + m <= max_N, ordered by N then n.
std::vector<std::pair<int, int>> table_pairs(int max_N);

/// One row per pair, rows in input order.
std::vector<DimensionalConstants> beta_table(const std::vector<std::pair<int, int>>& pairs,
                                             const GroundStateOptions& options = {});

/// Header: n,m,N,p,alpha,beta,c1,c2,c3,c4,c5,c6,c7,c8,c9
std::string beta_table_csv(const std::vector<DimensionalConstants>& rows);

}  // namespace yamabe
