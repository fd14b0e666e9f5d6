#include "fracdiff/grunwald.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracdiff/errors.hpp"

namespace fracdiff {

namespace {

void require_diffusion_order(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw InvalidOrder("alpha must lie strictly inside (1,2), got " + std::to_string(alpha));
  }
}

// Shifted sum sum_{i=0}^{j+1} g_i f_{j-i+1} with f_{n+1} = exterior, unscaled.
std::vector<double> shifted_sums(const GridFunction& f, const GrunwaldWeights& g,
                                 double exterior) {
  const std::size_t n = f.intervals();
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t j = 0; j <= n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= j + 1; ++i) {
      const std::size_t node = j + 1 - i;
      acc += g[i] * (node > n ? exterior : f[node]);
    }
    out[j] = acc;
  }
  return out;
}

std::vector<double> unshifted_sums(const GridFunction& f, const GrunwaldWeights& g) {
  const std::size_t n = f.intervals();
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t j = 0; j <= n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= j; ++i) acc += g[i] * f[j - i];
    out[j] = acc;
  }
  return out;
}

}  // namespace

std::string_view to_string(DerivativeForm form) {
  switch (form) {
    case DerivativeForm::RiemannLiouville: return "rl";
    case DerivativeForm::PatieSimon: return "ps";
    case DerivativeForm::Caputo: return "caputo";
  }
  return "?";
}

GrunwaldWeights grunwald_weights(double order, std::size_t m) {
  if (!std::isfinite(order)) throw InvalidOrder("Grunwald order must be finite");
  std::vector<double> g(m + 1);
  g[0] = 1.0;
  for (std::size_t i = 1; i <= m; ++i) {
    const auto di = static_cast<double>(i);
    g[i] = g[i - 1] * (di - 1.0 - order) / di;
  }
  return GrunwaldWeights(order, std::move(g));
}

GridFunction rl_derivative_grid(const GridFunction& f, double alpha, Stencil stencil,
                                double exterior) {
  require_diffusion_order(alpha);
  const std::size_t n = f.intervals();
  const double scale = std::pow(f.spacing(), -alpha);
  const auto g = grunwald_weights(alpha, n + 1);
  auto sums = stencil == Stencil::Shifted ? shifted_sums(f, g, exterior) : unshifted_sums(f, g);
  for (double& s : sums) s *= scale;
  return GridFunction(std::move(sums));
}

GridFunction ps_derivative_grid(const GridFunction& f, double alpha, double exterior) {
  require_diffusion_order(alpha);
  const std::size_t n = f.intervals();
  const double scale = std::pow(f.spacing(), -alpha);
  const auto g = grunwald_weights(alpha, n + 1);
  const auto g1 = grunwald_weights(alpha - 1.0, n + 1);
  auto sums = shifted_sums(f, g, exterior);
  for (std::size_t j = 0; j <= n; ++j) sums[j] = scale * (sums[j] - g1[j + 1] * f[0]);
  return GridFunction(std::move(sums));
}

GridFunction caputo_derivative_grid(const GridFunction& f, double alpha, double exterior) {
  require_diffusion_order(alpha);
  const std::size_t n = f.intervals();
  const double scale = std::pow(f.spacing(), -alpha);
  const auto g = grunwald_weights(alpha, n + 1);
  const auto g1 = grunwald_weights(alpha - 1.0, n + 1);
  const auto g2 = grunwald_weights(alpha - 2.0, n + 1);
  auto sums = shifted_sums(f, g, exterior);
  for (std::size_t j = 0; j <= n; ++j) {
    sums[j] = scale * (sums[j] - g1[j + 1] * f[0] - g2[j + 1] * f[1] + g2[j + 1] * f[0]);
  }
  return GridFunction(std::move(sums));
}

GridFunction flux_profile(const GridFunction& u, double alpha, double diffusivity,
                          DerivativeForm form) {
  require_diffusion_order(alpha);
  if (form == DerivativeForm::Caputo) {
    throw UnsupportedForm("no fractional flux is defined for the Caputo form");
  }
  if (!(diffusivity > 0.0)) throw InvalidSpec("diffusivity must be positive");

  const std::size_t n = u.intervals();
  const double h = u.spacing();
  const double order = alpha - 1.0;
  const auto g = grunwald_weights(order, n);
  auto q = unshifted_sums(u, g);
  const double scale = -diffusivity * std::pow(h, -order);
  for (double& v : q) v *= scale;

  if (form == DerivativeForm::PatieSimon) {
    // Discrete u_0 x^{1-a} / Gamma(2-a): h^{1-a} sum_{i<=j} g^{a-1}_i u_0 = h^{1-a} g^{a-2}_j u_0.
    const auto g2 = grunwald_weights(order - 1.0, n);
    for (std::size_t j = 0; j <= n; ++j) q[j] -= scale * g2[j] * u[0];
  }
  return GridFunction(std::move(q));
}

double recursion_defect(const GrunwaldWeights& weights) {
  double worst = 0.0;
  const double order = weights.order();
  for (std::size_t i = 1; i <= weights.last_index(); ++i) {
    const auto di = static_cast<double>(i);
    const double expected = weights[i - 1] * ((di - 1.0 - order) / di);
    const double scale = std::max(std::abs(expected), std::abs(weights[i]));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(weights[i] - expected) / scale);
  }
  return worst;
}

double cumulative_sum_defect(double order, std::size_t m) {
  const auto g = grunwald_weights(order, m);
  const auto g1 = grunwald_weights(order - 1.0, m);
  double sum = 0.0;
  for (double v : g.values()) sum += v;
  return std::abs(sum - g1[m]);
}

}  // namespace fracdiff
