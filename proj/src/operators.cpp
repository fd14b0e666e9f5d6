#include "fracdiff/operators.hpp"

#include <cmath>
#include <string>

#include "fracdiff/errors.hpp"

namespace fracdiff {

namespace {

using Index = Eigen::Index;

struct Weights {
  GrunwaldWeights a;   // order alpha
  GrunwaldWeights a1;  // order alpha - 1
  GrunwaldWeights a2;  // order alpha - 2
};

Weights weights_for(const SchemeSpec& spec) {
  return {grunwald_weights(spec.alpha, spec.n + 1), grunwald_weights(spec.alpha - 1.0, spec.n + 1),
          grunwald_weights(spec.alpha - 2.0, spec.n + 1)};
}

// Riemann-Liouville. Interior columns 0<j<n carry g^a_{j-i+1} for i <= j+1,
// row 0 included. Reflecting left: b10 = 1, b00 = 1 - a. Reflecting right:
// b_in = -g^{a-1}_{n-i} for every i. Absorbing sides leave their column zero.
void fill_riemann_liouville(Eigen::MatrixXd& b, const SchemeSpec& spec, const Weights& w) {
  const Index n = static_cast<Index>(spec.n);
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i <= j + 1; ++i) b(i, j) = w.a[static_cast<std::size_t>(j - i + 1)];
  }
  if (spec.left == BoundaryCondition::Reflecting) {
    b(1, 0) = 1.0;
    b(0, 0) = 1.0 - spec.alpha;
  }
  if (spec.right == BoundaryCondition::Reflecting) {
    for (Index i = 0; i <= n; ++i) b(i, n) = -w.a1[static_cast<std::size_t>(n - i)];
  }
}

// Patie-Simon. Same interior for rows i > 0; row 0 becomes b0j = -g^{a-1}_j.
// Reflecting left: b10 = 1, b00 = -1. Reflecting right: b0n = g^{a-2}_{n-1} and
// b_in = -g^{a-1}_{n-i} for i > 0.
void fill_patie_simon(Eigen::MatrixXd& b, const SchemeSpec& spec, const Weights& w) {
  const Index n = static_cast<Index>(spec.n);
  for (Index j = 1; j < n; ++j) {
    b(0, j) = -w.a1[static_cast<std::size_t>(j)];
    for (Index i = 1; i <= j + 1; ++i) b(i, j) = w.a[static_cast<std::size_t>(j - i + 1)];
  }
  if (spec.left == BoundaryCondition::Reflecting) {
    b(1, 0) = 1.0;
    b(0, 0) = -1.0;
  }
  if (spec.right == BoundaryCondition::Reflecting) {
    b(0, n) = w.a2[static_cast<std::size_t>(n - 1)];
    for (Index i = 1; i <= n; ++i) b(i, n) = -w.a1[static_cast<std::size_t>(n - i)];
  }
}

// Caputo, absorbing on both sides. Rows 0 and 1 pick up the g^{a-2} corrections
// of the four-term Grunwald formula.
void fill_caputo(Eigen::MatrixXd& b, const SchemeSpec& spec, const Weights& w) {
  const Index n = static_cast<Index>(spec.n);
  for (Index j = 1; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    b(0, j) = -w.a1[uj] + w.a2[uj + 1];
    b(1, j) = w.a[uj] - w.a2[uj + 1];
    for (Index i = 2; i <= j + 1; ++i) b(i, j) = w.a[static_cast<std::size_t>(j - i + 1)];
  }
}

}  // namespace

std::string_view to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Absorbing ? "absorbing" : "reflecting";
}

void SchemeSpec::validate() const {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw InvalidSpec("alpha must lie strictly inside (1,2), got " + std::to_string(alpha));
  }
  if (!(diffusivity > 0.0) || !std::isfinite(diffusivity)) {
    throw InvalidSpec("diffusivity C must be positive and finite");
  }
  if (n < 2) throw InvalidSpec("need n >= 2 intervals so that interior nodes exist");
  if (form == DerivativeForm::Caputo &&
      (left == BoundaryCondition::Reflecting || right == BoundaryCondition::Reflecting)) {
    throw UnsupportedCombination("the Caputo form is only defined with absorbing boundaries");
  }
}

IterationMatrix build_matrix(const SchemeSpec& spec) {
  spec.validate();
  const auto size = static_cast<Index>(spec.n + 1);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(size, size);
  const Weights w = weights_for(spec);
  switch (spec.form) {
    case DerivativeForm::RiemannLiouville: fill_riemann_liouville(b, spec, w); break;
    case DerivativeForm::PatieSimon: fill_patie_simon(b, spec, w); break;
    case DerivativeForm::Caputo: fill_caputo(b, spec, w); break;
  }
  return IterationMatrix(std::move(b));
}

std::vector<double> row_sums(const IterationMatrix& b) {
  std::vector<double> sums(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) acc += b(i, j);
    sums[i] = acc;
  }
  return sums;
}

std::vector<double> absorbed_rates(const SchemeSpec& spec, const IterationMatrix& b) {
  if (b.intervals() != spec.n) {
    throw DimensionMismatch("matrix size does not match the spec's grid");
  }
  auto rates = row_sums(b);
  for (double& r : rates) r = -r;
  return rates;
}

}  // namespace fracdiff
