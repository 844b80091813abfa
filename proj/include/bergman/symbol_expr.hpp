#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bergman {

using cplx = std::complex<double>;

enum class NodeKind {
  Const,
  VarZ,
  VarW,
  Conj,
  Neg,
  Add,
  Sub,
  Mul,
  Pow,
  Re,
  Im,
  Abs,
  Exp,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// One immutable AST node. Unused fields are left at their defaults.
struct Node {
  NodeKind kind;
  cplx value{};            // Const
  std::uint32_t exponent{};  // Pow
  NodePtr lhs;             // unary operand or left operand
  NodePtr rhs;             // right operand of binary nodes
};

enum class Arity { OneVariable, TwoVariable };

/// Thrown by parse(). Carries the byte offset of the offending token and the
/// set of tokens that would have been accepted there.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected,
             const std::string& message);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// A continuous symbol f(z, w) or phi(z) on the closed (bi-)disc.
///
/// Values are immutable; copies share the tree, so a SymbolExpr may be
/// evaluated from any number of threads at once.
class SymbolExpr {
 public:
  explicit SymbolExpr(NodePtr root);

  const NodePtr& root() const noexcept { return root_; }
  Arity arity() const noexcept { return arity_; }
  bool is_two_variable() const noexcept { return arity_ == Arity::TwoVariable; }
  bool uses_z() const noexcept { return uses_z_; }

  /// True if the tree contains re/im/abs/exp (no quadrature exactness).
  bool has_transcendental() const noexcept { return transcendental_; }

  /// Pointwise value. Throws std::invalid_argument when a two-variable
  /// expression is evaluated without w.
  cplx eval(cplx z, std::optional<cplx> w = std::nullopt) const;

  /// Grammar-conformant text; parse(to_string()) evaluates identically.
  std::string to_string() const;

 private:
  NodePtr root_;
  Arity arity_;
  bool uses_z_;
  bool transcendental_;
};

// Node factories.
NodePtr make_const(cplx c);
NodePtr make_var_z();
NodePtr make_var_w();
NodePtr make_unary(NodeKind kind, NodePtr operand);
NodePtr make_binary(NodeKind kind, NodePtr lhs, NodePtr rhs);
NodePtr make_pow(NodePtr base, std::uint32_t exponent);

/// Structural equality of two trees.
bool structurally_equal(const Node& a, const Node& b);

/// Parses the symbol grammar:
///
///   expr   := term (('+'|'-') term)* ;
///   term   := factor ('*' factor)* ;
///   factor := base ('^' uint)? ;
///   base   := 'z' | 'w' | number | '(' expr ')' | '-' base | func '(' expr ')' ;
///   func   := 'conj' | 're' | 'im' | 'abs' | 'exp' ;
///   number := real | '(' real ('+'|'-') real 'i' ')' ;
SymbolExpr parse(std::string_view text);

/// f(e^{i theta1}, zeta) as a one-variable symbol in zeta (written as z).
/// Throws std::invalid_argument for one-variable input.
SymbolExpr slice_theta1(const SymbolExpr& e, double theta1);

/// f(zeta, e^{i theta2}) as a one-variable symbol in zeta.
/// Throws std::invalid_argument for one-variable input.
SymbolExpr slice_theta2(const SymbolExpr& e, double theta2);

/// Substitutes z <-> w.
SymbolExpr swap_variables(const SymbolExpr& e);

enum class Analyticity { Constant, Holomorphic, Antiholomorphic, General };

/// Syntactic classification of a one-variable symbol: Holomorphic when z
/// never appears under an odd number of conj() and never under re/im/abs.
/// Two-variable symbols are General.
Analyticity analyticity(const SymbolExpr& e);

struct Monomial {
  std::uint32_t a;  // power of z
  std::uint32_t b;  // power of conj(z)
  cplx c;
};

/// sum c * z^a * conj(z)^b with pairwise distinct (a, b); empty means zero.
/// Terms are ordered by decreasing a, then decreasing b.
struct MonomialDecomposition {
  std::vector<Monomial> terms;

  cplx eval(cplx z) const;
  std::uint32_t degree() const;
};

/// Collected z^a conj(z)^b form for one-variable polynomial symbols (built from
/// constants, z, conj, negation, +, -, *, ^). Returns nullopt otherwise.
std::optional<MonomialDecomposition> expand_polynomial(const SymbolExpr& e);

/// A term c * g(z) * h(w) of a separable symbol; g and h are one-variable
/// expressions in z (h has had w renamed to z).
struct SeparableTerm {
  SymbolExpr z_factor;
  SymbolExpr w_factor;
};

/// Splits a symbol that is syntactically a signed sum of products whose
/// factors each depend on at most one variable. Returns nullopt otherwise.
std::optional<std::vector<SeparableTerm>> split_separable(const SymbolExpr& e);

}  // namespace bergman
