#include "bergman/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace bergman {

namespace {

void check_dimension(std::size_t n, std::size_t cap, const char* what) {
  if (n == 0 || n > cap) {
    throw std::invalid_argument(fmt::format("{}: dimension {} outside [1, {}]", what, n, cap));
  }
}

// e^{2 pi i t / q} for t = 0..q-1.
std::vector<cplx> roots_of_unity(std::size_t q) {
  std::vector<cplx> out(q);
  for (std::size_t t = 0; t < q; ++t) {
    out[t] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(q));
  }
  return out;
}

Eigen::MatrixXcd assemble_exact(const MonomialDecomposition& poly, std::size_t n) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& t : poly.terms) {
    for (std::size_t k = 0; k < n; ++k) {
      const long long j = static_cast<long long>(k) + t.a - static_cast<long long>(t.b);
      if (j < 0 || j >= static_cast<long long>(n)) continue;
      const auto ju = static_cast<std::size_t>(j);
      m(ju, k) += t.c * monomial_entry_exact(t.a, t.b, ju, k);
    }
  }
  return m;
}

Eigen::MatrixXcd assemble_quadrature(const SymbolExpr& e, std::size_t n, const QuadratureRule& rule) {
  const std::size_t qr = rule.radial_count();
  const std::size_t qt = rule.angular_count;
  const auto roots = roots_of_unity(qt);

  // Symbol values on the node table, evaluated once.
  std::vector<cplx> values(qr * qt);
  for (std::size_t i = 0; i < qr; ++i) {
    for (std::size_t m = 0; m < qt; ++m) {
      values[i * qt + m] = e.eval(rule.radial_nodes[i] * roots[m]);
    }
  }

  // Angular moments sum_m phi(r_i, theta_m) e^{i d theta_m} for d = k - j.
  const std::size_t nd = 2 * n - 1;
  const long long offset = static_cast<long long>(n) - 1;
  std::vector<cplx> moments(qr * nd);
  for (std::size_t i = 0; i < qr; ++i) {
    for (std::size_t di = 0; di < nd; ++di) {
      const long long d = static_cast<long long>(di) - offset;
      const long long qs = static_cast<long long>(qt);
      const std::size_t step = static_cast<std::size_t>(((d % qs) + qs) % qs);
      cplx acc{};
      std::size_t t = 0;
      for (std::size_t m = 0; m < qt; ++m) {
        acc += values[i * qt + m] * roots[t];
        t += step;
        if (t >= qt) t -= qt;
      }
      moments[i * nd + di] = acc * rule.angular_weight();
    }
  }

  // Radial powers r_i^p for p = 1 .. 2n - 1.
  std::vector<double> rpow(qr * 2 * n);
  for (std::size_t i = 0; i < qr; ++i) {
    double r = 1.0;
    for (std::size_t p = 0; p < 2 * n; ++p) {
      rpow[i * 2 * n + p] = r;
      r *= rule.radial_nodes[i];
    }
  }

  Eigen::MatrixXcd m(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t di = static_cast<std::size_t>(static_cast<long long>(k) - static_cast<long long>(j) + offset);
      const std::size_t p = j + k + 1;
      cplx acc{};
      for (std::size_t i = 0; i < qr; ++i) {
        acc += rule.radial_weights[i] * rpow[i * 2 * n + p] * moments[i * nd + di];
      }
      m(j, k) = acc * (BasisSpec::normalization(j) * BasisSpec::normalization(k));
    }
  }
  return m;
}

// Full product quadrature over D x D. Weighted basis products are arranged so
// that the sum over nodes becomes two dense matrix products.
Eigen::MatrixXcd assemble_2d_quadrature(const SymbolExpr& e, std::size_t n, const QuadratureRule& rule) {
  const std::size_t qr = rule.radial_count();
  const std::size_t qt = rule.angular_count;
  const std::size_t nodes = qr * qt;
  const std::size_t n2 = n * n;

  std::vector<cplx> points(nodes);
  Eigen::MatrixXcd weighted(nodes, n2);  // row p, column (i * n + k): w_p e_k(p) conj(e_i(p))
  BasisSpec basis{n};
  for (std::size_t ir = 0; ir < qr; ++ir) {
    const double r = rule.radial_nodes[ir];
    const double w = rule.radial_weights[ir] * r * rule.angular_weight();
    for (std::size_t m = 0; m < qt; ++m) {
      const std::size_t p = ir * qt + m;
      points[p] = std::polar(r, rule.angular_node(m));
      std::vector<cplx> ev(n);
      for (std::size_t k = 0; k < n; ++k) ev[k] = basis.eval(k, points[p]);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) weighted(p, i * n + k) = w * ev[k] * std::conj(ev[i]);
      }
    }
  }

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n2, n2);  // rows (i, k), cols (j, l)
  constexpr std::size_t kBlock = 256;
  Eigen::MatrixXcd fblock;
  for (std::size_t p0 = 0; p0 < nodes; p0 += kBlock) {
    const std::size_t rows = std::min(kBlock, nodes - p0);
    fblock.resize(rows, nodes);
    for (std::size_t a = 0; a < rows; ++a) {
      for (std::size_t q = 0; q < nodes; ++q) fblock(a, q) = e.eval(points[p0 + a], points[q]);
    }
    const Eigen::MatrixXcd g = fblock * weighted;  // rows p, cols (j, l)
    h.noalias() += weighted.middleRows(p0, rows).transpose() * g;
  }

  Eigen::MatrixXcd out(n2, n2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) out(i * n + j, k * n + l) = h(i * n + k, j * n + l);
      }
    }
  }
  return out;
}

}  // namespace

double BasisSpec::normalization(std::size_t k) {
  return std::sqrt(static_cast<double>(k + 1) / std::numbers::pi);
}

cplx BasisSpec::eval(std::size_t k, cplx z) const {
  cplx p{1.0, 0.0};
  for (std::size_t i = 0; i < k; ++i) p *= z;
  return normalization(k) * p;
}

Eigen::MatrixXcd gram_matrix(const BasisSpec& basis, const QuadratureRule& rule) {
  const std::size_t n = basis.n;
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  std::vector<cplx> ev(n);
  for (std::size_t ir = 0; ir < rule.radial_count(); ++ir) {
    const double r = rule.radial_nodes[ir];
    const double w = rule.radial_weights[ir] * r * rule.angular_weight();
    for (std::size_t m = 0; m < rule.angular_count; ++m) {
      const cplx z = std::polar(r, rule.angular_node(m));
      for (std::size_t k = 0; k < n; ++k) ev[k] = basis.eval(k, z);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) g(j, k) += w * ev[k] * std::conj(ev[j]);
      }
    }
  }
  return g;
}

const char* to_string(AssemblyMode mode) {
  switch (mode) {
    case AssemblyMode::Quadrature:
      return "quadrature";
    case AssemblyMode::ExactMonomial:
      return "exact-monomial";
    case AssemblyMode::Kronecker:
      return "kronecker";
  }
  return "unknown";
}

double monomial_entry_exact(std::size_t a, std::size_t b, std::size_t j, std::size_t k) {
  if (j + b != k + a) return 0.0;
  return 2.0 * std::sqrt(static_cast<double>(j + 1) * static_cast<double>(k + 1)) /
         static_cast<double>(a + b + j + k + 2);
}

cplx matrix_entry_1d(const SymbolExpr& e, std::size_t j, std::size_t k, const QuadratureRule& rule) {
  if (e.is_two_variable()) throw std::invalid_argument("matrix_entry_1d: symbol is two-variable");
  const long long d = static_cast<long long>(k) - static_cast<long long>(j);
  cplx acc{};
  for (std::size_t i = 0; i < rule.radial_count(); ++i) {
    const double r = rule.radial_nodes[i];
    cplx ring{};
    for (std::size_t m = 0; m < rule.angular_count; ++m) {
      const double theta = rule.angular_node(m);
      ring += e.eval(std::polar(r, theta)) * std::polar(1.0, static_cast<double>(d) * theta);
    }
    acc += rule.radial_weights[i] * std::pow(r, static_cast<double>(j + k + 1)) * ring;
  }
  return acc * rule.angular_weight() * BasisSpec::normalization(j) * BasisSpec::normalization(k);
}

ToeplitzMatrix1D build_toeplitz_1d(const SymbolExpr& e, std::size_t n, const QuadratureRule& rule,
                                   AssemblyPath path) {
  if (e.is_two_variable()) throw std::invalid_argument("build_toeplitz_1d: symbol is two-variable");
  check_dimension(n, kMaxSection1D, "build_toeplitz_1d");
  ToeplitzMatrix1D out;
  out.meta = {e.to_string(), n, rule.radial_count(), rule.angular_count, AssemblyMode::Quadrature};
  if (path == AssemblyPath::Auto) {
    if (auto poly = expand_polynomial(e)) {
      out.entries = assemble_exact(*poly, n);
      out.meta.mode = AssemblyMode::ExactMonomial;
      return out;
    }
  }
  out.entries = assemble_quadrature(e, n, rule);
  if (path == AssemblyPath::Auto) {
    // phi * e_k of a holomorphic phi has no z^j with j < k, so those entries
    // vanish exactly; the antiholomorphic case mirrors it.
    const Analyticity kind = analyticity(e);
    const auto ni = static_cast<Eigen::Index>(n);
    for (Eigen::Index j = 0; j < ni; ++j) {
      for (Eigen::Index k = 0; k < ni; ++k) {
        const bool zero = (kind == Analyticity::Holomorphic && j < k) ||
                          (kind == Analyticity::Antiholomorphic && j > k) ||
                          (kind == Analyticity::Constant && j != k);
        if (zero) out.entries(j, k) = 0.0;
      }
    }
  }
  return out;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const Eigen::Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  Eigen::MatrixXcd out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i) {
    for (Eigen::Index k = 0; k < ac; ++k) out.block(i * br, k * bc, br, bc) = a(i, k) * b;
  }
  return out;
}

ToeplitzMatrix2D build_toeplitz_2d(const SymbolExpr& e, std::size_t n, const QuadratureRule& rule,
                                   AssemblyPath path) {
  check_dimension(n, kMaxSection2D, "build_toeplitz_2d");
  ToeplitzMatrix2D out;
  out.meta = {e.to_string(), n, rule.radial_count(), rule.angular_count, AssemblyMode::Quadrature};
  if (path == AssemblyPath::Auto) {
    if (auto terms = split_separable(e)) {
      out.entries = Eigen::MatrixXcd::Zero(n * n, n * n);
      for (const auto& t : *terms) {
        out.entries += kron(build_toeplitz_1d(t.z_factor, n, rule).entries,
                            build_toeplitz_1d(t.w_factor, n, rule).entries);
      }
      out.meta.mode = AssemblyMode::Kronecker;
      return out;
    }
  }
  out.entries = assemble_2d_quadrature(e, n, rule);
  return out;
}

}  // namespace bergman
