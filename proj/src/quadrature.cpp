#include "yamabe/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "yamabe/errors.hpp"

namespace yamabe {

namespace {

using Rule = boost::math::quadrature::gauss<double, 10>;

double gauss_panel(double a, double b, const ScalarFn& f) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  // 10-point rule: abscissa() holds the 5 non-negative nodes, no zero node.
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = half * x[k];
    sum += w[k] * (f(mid + dx) + f(mid - dx));
  }
  return half * sum;
}

}  // namespace

double integrate_cells(std::span<const double> breakpoints, const ScalarFn& f) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    total += gauss_panel(breakpoints[i], breakpoints[i + 1], f);
  }
  return total;
}

double integrate_panels(double a, double b, std::size_t panels, const ScalarFn& f) {
  if (panels == 0) throw Error(ErrorCode::InvalidArgument, "integrate_panels needs at least one panel");
  const double h = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + h * static_cast<double>(i);
    const double hi = (i + 1 == panels) ? b : lo + h;
    total += gauss_panel(lo, hi, f);
  }
  return total;
}

double integrate_to_infinity(double a, const ScalarFn& f) {
  boost::math::quadrature::exp_sinh<double> integrator;
  const double tol = std::sqrt(std::numeric_limits<double>::epsilon());
  // Far out the integrands are exp(-t) times a power, which can overflow into 0*inf.
  return integrator.integrate(
      [&](double t) {
        const double v = f(t);
        return (std::isfinite(v) || t < a + 700.0) ? v : 0.0;
      },
      a, std::numeric_limits<double>::infinity(), tol);
}

double radial_integral(const RadialGrid& grid, const ScalarFn& f, bool with_tail) {
  double total = integrate_cells(grid.nodes(), f);
  if (with_tail) total += integrate_to_infinity(grid.r_max(), f);
  return total;
}

int Monomial::degree() const {
  int d = 0;
  for (int p : powers) d += p;
  return d;
}

bool Monomial::is_odd() const {
  for (int p : powers) {
    if (p % 2 != 0) return true;
  }
  return false;
}

double sphere_area(int d) {
  const double half = 0.5 * (d + 1);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double sphere_moment(const Monomial& weight, int n) {
  if (static_cast<int>(weight.powers.size()) > n) {
    throw Error(ErrorCode::InvalidArgument, "monomial has more variables than the dimension");
  }
  if (weight.is_odd()) return 0.0;
  // int_{S^{n-1}} z^a = 2 prod Gamma((a_i+1)/2) / Gamma((|a|+n)/2)
  double log_num = 0.0;
  for (int i = 0; i < n; ++i) {
    const int a = i < static_cast<int>(weight.powers.size()) ? weight.powers[i] : 0;
    log_num += boost::math::lgamma(0.5 * (a + 1));
  }
  const double log_den = boost::math::lgamma(0.5 * (weight.degree() + n));
  return 2.0 * std::exp(log_num - log_den);
}

double moment_reduce(const RadialGrid& cells, const ScalarFn& profile, const Monomial& weight, int n,
                     bool with_tail) {
  if (weight.is_odd()) return 0.0;
  const int power = n - 1 + weight.degree();
  const double angular = sphere_moment(weight, n);
  const double radial = radial_integral(
      cells, [&](double r) { return profile(r) * std::pow(r, power); }, with_tail);
  return angular * radial;
}

double moment_reduce(const RadialFunction& profile, const Monomial& weight, int n) {
  return moment_reduce(profile.grid(), [&](double r) { return profile(r); }, weight, n,
                       profile.has_tail());
}

}  // namespace yamabe
