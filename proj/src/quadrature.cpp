#include "bergman/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace bergman {

double QuadratureRule::angular_weight() const noexcept {
  return 2.0 * std::numbers::pi / static_cast<double>(angular_count);
}

double QuadratureRule::angular_node(std::size_t m) const noexcept {
  return 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(angular_count);
}

namespace {

// Returns (P_n(x), P_n'(x)) by the three-term recurrence.
std::pair<double, double> legendre(std::size_t n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
    p0 = p1;
    p1 = p2;
  }
  const double dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

void gauss_legendre_unit(std::size_t count, std::vector<double>& nodes,
                         std::vector<double>& weights) {
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  const double n = static_cast<double>(count);
  for (std::size_t i = 0; i < (count + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(count, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(count, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // [-1, 1] -> [0, 1], ascending.
    nodes[i] = 0.5 * (1.0 - x);
    nodes[count - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = 0.5 * w;
    weights[count - 1 - i] = 0.5 * w;
  }
}

QuadratureRule build_quadrature(std::size_t q_r, std::size_t q_theta) {
  if (q_r == 0 || q_theta == 0) {
    throw std::invalid_argument("build_quadrature: counts must be positive");
  }
  QuadratureRule rule;
  gauss_legendre_unit(q_r, rule.radial_nodes, rule.radial_weights);
  rule.angular_count = q_theta;
  return rule;
}

}  // namespace bergman
