#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "yamabe/quadrature.hpp"

namespace oracles {

double l0_psi_error(const yamabe::GroundState& gs, const yamabe::RadialFunction& psi,
                    const std::vector<std::vector<double>>& points, double h) {
  auto norm = [](const std::vector<double>& z) {
    double s = 0;
    for (double v : z) s += v * v;
    return std::sqrt(s);
  };
  auto f = [&](const std::vector<double>& z) { return psi(norm(z)) * z[0] * z[1]; };
  double worst = 0, scale = 0;
  for (const auto& z : points) {
    const double center = f(z);
    double lap = 0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      auto plus = z, minus = z;
      plus[k] += h;
      minus[k] -= h;
      lap += (f(plus) - 2 * center + f(minus)) / (h * h);
    }
    const double r = norm(z);
    const yamabe::Jet u = gs.eval(r);
    const double lhs = -lap + center - (gs.p - 1) * std::pow(u.f, gs.p - 2) * center;
    const double rhs = u.df / r * z[0] * z[1];
    worst = std::max(worst, std::abs(lhs - rhs));
    scale = std::max(scale, std::abs(rhs));
  }
  return worst / scale;
}

double gamma_direct_s2(const yamabe::GroundState& gs, const std::vector<double>& b) {
  constexpr int kPhi = 128;
  const double pi = std::numbers::pi;
  auto sphere_mean = [&](double r) {
    return yamabe::integrate_panels(0.0, pi, 24, [&](double th) {
      double sum = 0;
      for (int j = 0; j < kPhi; ++j) {
        const double ph = 2 * pi * j / kPhi;
        const double dot = b[0] * std::sin(th) * std::cos(ph) + b[1] * std::sin(th) * std::sin(ph) + b[2] * std::cos(th);
        sum += std::exp(r * dot);
      }
      return sum * (2 * pi / kPhi) * std::sin(th);
    });
  };
  return yamabe::integrate_panels(0.0, 50.0, 200, [&](double r) {
    const double u = gs.eval(r).f;
    return r * r * std::pow(u, gs.p - 1) * sphere_mean(r);
  });
}

}  // namespace oracles
