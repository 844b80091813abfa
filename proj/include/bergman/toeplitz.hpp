#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "bergman/quadrature.hpp"
#include "bergman/symbol_expr.hpp"

namespace bergman {

inline constexpr std::size_t kMaxSection1D = 256;
inline constexpr std::size_t kMaxSection2D = 24;

/// Orthonormal monomial basis e_k(z) = sqrt((k + 1) / pi) z^k of A^2(D) under
/// the unnormalised area inner product.
struct BasisSpec {
  std::size_t n = 0;

  static double normalization(std::size_t k);
  cplx eval(std::size_t k, cplx z) const;
};

/// Quadrature Gram matrix <e_k, e_j> of e_0..e_{n-1}.
Eigen::MatrixXcd gram_matrix(const BasisSpec& basis, const QuadratureRule& rule);

enum class AssemblyMode { Quadrature, ExactMonomial, Kronecker };

const char* to_string(AssemblyMode mode);

struct AssemblyMeta {
  std::string symbol;
  std::size_t n = 0;
  std::size_t q_r = 0;
  std::size_t q_theta = 0;
  AssemblyMode mode = AssemblyMode::Quadrature;
};

/// N x N section of T_phi; entry (j, k) = <T_phi e_k, e_j>.
struct ToeplitzMatrix1D {
  Eigen::MatrixXcd entries;
  AssemblyMeta meta;
};

/// N^2 x N^2 section of T_f over e_m(z) e_n(w); (m, n) has index m * N + n.
struct ToeplitzMatrix2D {
  Eigen::MatrixXcd entries;
  AssemblyMeta meta;
};

/// <z^a conj(z)^b e_k, e_j> in closed form:
/// 2 sqrt((j+1)(k+1)) / (a+b+j+k+2) if j = k + a - b, else 0.
double monomial_entry_exact(std::size_t a, std::size_t b, std::size_t j, std::size_t k);

/// Quadrature value of <phi e_k, e_j>. Throws for two-variable symbols.
cplx matrix_entry_1d(const SymbolExpr& e, std::size_t j, std::size_t k,
                     const QuadratureRule& rule);

enum class AssemblyPath { Auto, ForceQuadrature };

/// Uses the exact monomial formula when the symbol expands to a polynomial in
/// z and conj(z); otherwise quadrature with symbol values cached per node.
ToeplitzMatrix1D build_toeplitz_1d(const SymbolExpr& e, std::size_t n,
                                   const QuadratureRule& rule,
                                   AssemblyPath path = AssemblyPath::Auto);

/// Row-major Kronecker product: out[(i*q + j), (k*q + l)] = a(i, k) * b(j, l).
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Section of T_f on the bi-disc. Separable symbols (sums of g(z) h(w)) are
/// assembled as sums of Kronecker products; anything else by product
/// quadrature over D x D with the given per-factor rule.
ToeplitzMatrix2D build_toeplitz_2d(const SymbolExpr& e, std::size_t n,
                                   const QuadratureRule& rule,
                                   AssemblyPath path = AssemblyPath::Auto);

}  // namespace bergman
