#include "yamabe/radial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "yamabe/errors.hpp"

namespace yamabe {

RadialGrid::RadialGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2 || nodes_.front() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "radial grid must start at 0 and hold at least two nodes");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw Error(ErrorCode::InvalidArgument,
                  "radial grid nodes must be strictly increasing (index " + std::to_string(i) + ")");
    }
  }
}

RadialGrid RadialGrid::graded(double r_max, std::size_t count, double grading_length) {
  if (count < 2 || !(r_max > 0.0) || !(grading_length > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "graded grid needs r_max > 0 and at least two nodes");
  }
  std::vector<double> nodes(count);
  const double growth = std::log1p(r_max / grading_length);
  for (std::size_t k = 0; k < count; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(count - 1);
    nodes[k] = grading_length * std::expm1(growth * s);
  }
  nodes.front() = 0.0;
  nodes.back() = r_max;
  return RadialGrid(std::move(nodes));
}

std::size_t RadialGrid::cell_of(double r) const {
  if (r <= nodes_.front()) return 0;
  if (r >= nodes_.back()) return nodes_.size() - 2;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

RadialGrid RadialGrid::truncated(double r_cut) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r_cut);
  std::vector<double> kept(nodes_.begin(), it);
  return RadialGrid(std::move(kept));
}

RadialFunction::RadialFunction(RadialGrid grid, std::vector<double> values, std::vector<double> first,
                               std::vector<double> second, Tail tail)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      first_(std::move(first)),
      second_(std::move(second)),
      tail_(std::move(tail)) {
  const auto n = grid_.size();
  if (values_.size() != n || first_.size() != n || second_.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "radial function data must match the grid size");
  }
  std::vector<double> x(grid_.nodes().begin(), grid_.nodes().end());
  std::vector<double> y = values_, dy = first_, d2y = second_;
  spline_ = std::make_shared<boost::math::interpolators::quintic_hermite<std::vector<double>>>(
      std::move(x), std::move(y), std::move(dy), std::move(d2y));
}

Jet RadialFunction::interpolate(double r) const {
  r = std::clamp(r, 0.0, grid_.r_max());
  return {(*spline_)(r), spline_->prime(r), spline_->double_prime(r)};
}

Jet RadialFunction::eval(double r) const {
  if (r < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "radial profiles are evaluated at r >= 0");
  }
  if (r <= grid_.r_max()) return interpolate(r);
  if (tail_) return tail_(r);
  return {};
}

}  // namespace yamabe
