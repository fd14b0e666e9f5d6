#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "fracdiff/grid.hpp"

namespace fracdiff {

/// Which fractional derivative drives the equation.
///  - RiemannLiouville: derivative outside the memory integral.
///  - PatieSimon: d/dx of the Caputo derivative of order alpha-1 (Caputo flux).
///  - Caputo: derivative inside the memory integral.
enum class DerivativeForm { RiemannLiouville, PatieSimon, Caputo };

std::string_view to_string(DerivativeForm form);

/// Prefix g_0..g_m of the Grunwald weights (-1)^i binom(order, i).
class GrunwaldWeights {
public:
  GrunwaldWeights(double order, std::vector<double> values)
      : order_(order), values_(std::move(values)) {}

  double order() const { return order_; }
  /// Largest index held (m).
  std::size_t last_index() const { return values_.size() - 1; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

private:
  double order_;
  std::vector<double> values_;
};

/// g_0 = 1, g_i = g_{i-1} (i - 1 - order) / i. Any finite order is accepted;
/// integer orders give a terminating sequence.
GrunwaldWeights grunwald_weights(double order, std::size_t m);

/// Placement of the Grunwald stencil. Shifted sums reach one node to the right.
enum class Stencil { Unshifted, Shifted };

/// Grunwald approximation of the Riemann-Liouville derivative on [0, x] at every node.
///
/// Unshifted: h^-a sum_{i=0}^{j} g_i f_{j-i}.
/// Shifted:   h^-a sum_{i=0}^{j+1} g_i f_{j-i+1}; at j = n this needs f(1 + h),
///            taken from `exterior` (0 unless the caller knows the extension).
///
/// Values at node 0 are the degenerate sums; accuracy holds at interior nodes.
GridFunction rl_derivative_grid(const GridFunction& f, double alpha, Stencil stencil,
                                double exterior = 0.0);

/// Patie-Simon derivative: shifted Riemann-Liouville sum minus h^-a g^{a-1}_{j+1} f_0.
GridFunction ps_derivative_grid(const GridFunction& f, double alpha, double exterior = 0.0);

/// Caputo derivative: the Patie-Simon sum with the extra pair
/// -h^-a g^{a-2}_{j+1} (f_1 - f_0).
GridFunction caputo_derivative_grid(const GridFunction& f, double alpha,
                                    double exterior = 0.0);

/// Fractional Fick flux q = -C D^{alpha-1} u from the unshifted sum of order alpha-1.
/// PatieSimon uses the Caputo flux, i.e. the RL value minus u_0 x^{1-a} / Gamma(2-a),
/// with that term taken as the Grunwald sum of the constant u_0 so constants
/// carry exactly zero flux.
GridFunction flux_profile(const GridFunction& u, double alpha, double diffusivity,
                          DerivativeForm form);

// Identity checks. These are for tests and the `verify` command, not hot paths.

/// Largest relative defect of g_i = g_{i-1} (i-1-order)/i, re-evaluated in a
/// different association order.
double recursion_defect(const GrunwaldWeights& weights);

/// |sum_{i=0}^{m} g^a_i - g^{a-1}_m|, with the sum accumulated left to right.
double cumulative_sum_defect(double order, std::size_t m);

}  // namespace fracdiff
