#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fracdiff/grunwald.hpp"

namespace fracdiff {

enum class BoundaryCondition { Absorbing, Reflecting };

std::string_view to_string(BoundaryCondition bc);

/// Full identity of a discrete problem: derivative form, boundary pair, order,
/// diffusivity and number of grid intervals.
struct SchemeSpec {
  DerivativeForm form = DerivativeForm::RiemannLiouville;
  BoundaryCondition left = BoundaryCondition::Absorbing;
  BoundaryCondition right = BoundaryCondition::Absorbing;
  double alpha = 1.5;
  double diffusivity = 1.0;
  std::size_t n = 2;

  double spacing() const { return 1.0 / static_cast<double>(n); }

  /// Throws InvalidSpec for alpha outside (1,2), C <= 0 or n < 2, and
  /// UnsupportedCombination for Caputo with a reflecting side.
  void validate() const;

  bool operator==(const SchemeSpec&) const = default;
};

/// Dense (n+1)x(n+1) rate matrix. Entry (i, j) is the rate at which mass moves
/// from node i to node j, so the explicit update is the row-vector product
/// u_{k+1} = u_k + beta u_k B.
class IterationMatrix {
public:
  explicit IterationMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {}

  std::size_t intervals() const { return static_cast<std::size_t>(entries_.rows()) - 1; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& entries() const { return entries_; }

private:
  Eigen::MatrixXd entries_;
};

/// Iteration matrix for one of the nine supported problems:
/// RL and PS with any boundary pair, Caputo with absorbing/absorbing.
/// Entries are pure rates; beta = C h^-a dt is applied by the stepper.
IterationMatrix build_matrix(const SchemeSpec& spec);

std::vector<double> row_sums(const IterationMatrix& b);

/// Per-node absorption rate a_i = -sum_j b_ij. Positive means mass leaves the
/// system from node i (per unit beta). Rows of pinned absorbing nodes never
/// carry mass, so their entries are inert.
std::vector<double> absorbed_rates(const SchemeSpec& spec, const IterationMatrix& b);

}  // namespace fracdiff
