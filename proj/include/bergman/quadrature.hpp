#pragma once

#include <cstddef>
#include <vector>

#include "bergman/symbol_expr.hpp"

namespace bergman {

/// Product rule on the closed unit disc in polar coordinates: Gauss-Legendre
/// on r in [0, 1] times the uniform (trapezoidal) rule on theta in [0, 2pi).
///
/// The area element r dr dtheta is NOT folded into the radial weights; callers
/// multiply by r themselves (see integrate()).
struct QuadratureRule {
  std::vector<double> radial_nodes;
  std::vector<double> radial_weights;
  std::size_t angular_count = 0;

  std::size_t radial_count() const noexcept { return radial_nodes.size(); }
  double angular_weight() const noexcept;
  double angular_node(std::size_t m) const noexcept;
};

/// Gauss-Legendre rule mapped to [0, 1] with the given point count.
void gauss_legendre_unit(std::size_t count, std::vector<double>& nodes,
                         std::vector<double>& weights);

/// Throws std::invalid_argument for zero counts.
QuadratureRule build_quadrature(std::size_t q_r, std::size_t q_theta);

/// Integral of f over the unit disc with respect to area measure dA.
template <class F>
cplx integrate(const QuadratureRule& rule, F&& f) {
  cplx acc{};
  for (std::size_t i = 0; i < rule.radial_count(); ++i) {
    const double r = rule.radial_nodes[i];
    cplx ring{};
    for (std::size_t m = 0; m < rule.angular_count; ++m) {
      ring += f(std::polar(r, rule.angular_node(m)));
    }
    acc += rule.radial_weights[i] * r * ring;
  }
  return acc * rule.angular_weight();
}

}  // namespace bergman
