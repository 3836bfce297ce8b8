#include "yamabe/fitting.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "yamabe/errors.hpp"

namespace yamabe {

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  const auto m = x.size();
  if (m < 2 || y.size() != m) {
    throw Error(ErrorCode::InvalidArgument, "power-law fit needs at least two matching samples");
  }
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd b(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(x[i] > 0.0) || !(std::abs(y[i]) > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "power-law fit needs nonzero samples at positive abscissae");
    }
    a(i, 0) = 1.0;
    a(i, 1) = std::log(x[i]);
    b(i) = std::log(std::abs(y[i]));
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  const double ss_res = (a * coef - b).squaredNorm();

  PowerLawFit fit;
  fit.intercept = coef(0);
  fit.slope = coef(1);
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.poor = fit.r2 < 0.98;
  return fit;
}

std::vector<double> fit_even_polynomial(std::span<const double> eps, std::span<const double> values,
                                        int max_order) {
  const auto m = eps.size();
  const auto cols = static_cast<std::size_t>(max_order + 1);
  if (max_order < 0 || values.size() != m || m < cols) {
    throw Error(ErrorCode::InvalidArgument, "even-polynomial fit needs at least as many samples as terms");
  }
  // Columns are scaled by the largest eps^2 so the basis stays well conditioned.
  double scale = 0.0;
  for (double e : eps) scale = std::max(scale, e * e);
  Eigen::MatrixXd a(m, cols);
  Eigen::VectorXd b(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double e2 = eps[i] * eps[i] / scale;
    double power = 1.0;
    for (std::size_t k = 0; k < cols; ++k) {
      a(i, k) = power;
      power *= e2;
    }
    b(i) = values[i];
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  std::vector<double> out(cols);
  double power = 1.0;
  for (std::size_t k = 0; k < cols; ++k) {
    out[k] = coef(static_cast<Eigen::Index>(k)) / power;
    power *= scale;
  }
  return out;
}

}  // namespace yamabe
