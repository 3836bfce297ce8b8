#pragma once

#include <functional>
#include <span>
#include <vector>

#include "yamabe/radial.hpp"

namespace yamabe {

using ScalarFn = std::function<double(double)>;

/// Composite 10-point Gauss-Legendre over consecutive breakpoints.
double integrate_cells(std::span<const double> breakpoints, const ScalarFn& f);

/// Composite 10-point Gauss-Legendre over `panels` equal panels of [a, b].
double integrate_panels(double a, double b, std::size_t panels, const ScalarFn& f);

/// Integral of f over [a, inf) by double-exponential quadrature.
double integrate_to_infinity(double a, const ScalarFn& f);

/// Integral of f over [0, inf): Gauss-Legendre on every grid cell, then the
/// semi-infinite remainder past r_max when `with_tail` is set.
double radial_integral(const RadialGrid& grid, const ScalarFn& f, bool with_tail = true);

/// Exponents of a monomial z_1^{a_1} z_2^{a_2} ... in R^n (missing entries are 0).
struct Monomial {
  std::vector<int> powers;

  int degree() const;
  bool is_odd() const;

  static Monomial one() { return {}; }
  static Monomial z1() { return {{1}}; }
  static Monomial z1_squared() { return {{2}}; }
  static Monomial z1_fourth() { return {{4}}; }
  static Monomial z1_squared_z2() { return {{2, 1}}; }
  static Monomial z1_squared_z2_squared() { return {{2, 2}}; }
};

/// Surface measure of the unit sphere S^{d} in R^{d+1}: 2 pi^{(d+1)/2} / Gamma((d+1)/2).
double sphere_area(int d);

/// Integral of the monomial over the unit sphere S^{n-1} in R^n.
double sphere_moment(const Monomial& weight, int n);

/// Integral over R^n of f(|z|) * monomial(z), reduced to a radial quadrature.
/// Odd monomials return exactly 0.
double moment_reduce(const RadialFunction& profile, const Monomial& weight, int n);

/// Same reduction for a profile given as a callable; the grid supplies the cells.
double moment_reduce(const RadialGrid& cells, const ScalarFn& profile, const Monomial& weight, int n,
                     bool with_tail = true);

}  // namespace yamabe
