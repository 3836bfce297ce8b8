#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <boost/math/interpolators/quintic_hermite.hpp>

namespace yamabe {

/// Value and first two derivatives of a scalar profile at one radius.
struct Jet {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

/// Strictly increasing radii with nodes[0] == 0.
class RadialGrid {
 public:
  explicit RadialGrid(std::vector<double> nodes);

  /// Exponentially graded nodes r_k = L((1 + r_max/L)^{k/(count-1)} - 1): spacing
  /// grows linearly with r, so the core and the turning region get the finest cells.
  static RadialGrid graded(double r_max, std::size_t count, double grading_length = 10.0);

  std::span<const double> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  double r_max() const { return nodes_.back(); }

  /// Index i of the cell [nodes[i], nodes[i+1]] containing r (clamped to the grid).
  std::size_t cell_of(double r) const;

  /// The same grid cut at the last node not exceeding r_cut.
  RadialGrid truncated(double r_cut) const;

 private:
  std::vector<double> nodes_;
};

/// A radial profile given by nodal (f, f', f'') and a C2 quintic Hermite interpolant.
/// An optional tail model continues the profile past r_max; without one the
/// profile is taken to vanish there.
class RadialFunction {
 public:
  using Tail = std::function<Jet(double)>;

  RadialFunction(RadialGrid grid, std::vector<double> values, std::vector<double> first,
                 std::vector<double> second, Tail tail = {});

  const RadialGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> first() const { return first_; }
  std::span<const double> second() const { return second_; }
  bool has_tail() const { return static_cast<bool>(tail_); }

  double r_max() const { return grid_.r_max(); }

  Jet eval(double r) const;
  double operator()(double r) const { return eval(r).f; }

  Jet node(std::size_t i) const { return {values_[i], first_[i], second_[i]}; }

  /// Interpolant only, never the tail; r must lie in [0, r_max].
  Jet interpolate(double r) const;

 private:
  RadialGrid grid_;
  std::vector<double> values_;
  std::vector<double> first_;
  std::vector<double> second_;
  Tail tail_;
  std::shared_ptr<boost::math::interpolators::quintic_hermite<std::vector<double>>> spline_;
};

}  // namespace yamabe
