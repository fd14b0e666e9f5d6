#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracdiff {

/// Nodal values u_j at x_j = j h, j = 0..n, on the unit interval with h = 1/n.
class GridFunction {
public:
  /// All-zero function on n intervals.
  explicit GridFunction(std::size_t intervals);

  /// Takes ownership of n+1 nodal values; needs at least two nodes.
  explicit GridFunction(std::vector<double> values);

  /// Samples f pointwise at every node.
  static GridFunction sample(std::size_t intervals,
                             const std::function<double(double)>& f);

  std::size_t intervals() const { return values_.size() - 1; }
  std::size_t size() const { return values_.size(); }
  double spacing() const { return 1.0 / static_cast<double>(intervals()); }

  /// x_j computed as j/n, so x_n is exactly 1.
  double node(std::size_t j) const {
    return static_cast<double>(j) / static_cast<double>(intervals());
  }

  double operator[](std::size_t j) const { return values_[j]; }
  double& operator[](std::size_t j) { return values_[j]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool operator==(const GridFunction&) const = default;

private:
  std::vector<double> values_;
};

}  // namespace fracdiff
