#pragma once

#include <span>
#include <vector>

namespace yamabe {

/// Least-squares line through (log x, log y).
struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// Set when r2 < 0.98; such fits are reported but should not be trusted.
  bool poor = false;
};

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

/// Coefficients a_0, a_1, ... of sum_k a_k eps^{2k} (k <= max_order) fitted in
/// the least-squares sense.
std::vector<double> fit_even_polynomial(std::span<const double> eps, std::span<const double> values,
                                        int max_order);

}  // namespace yamabe
