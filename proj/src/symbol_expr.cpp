#include "bergman/symbol_expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include <fmt/format.h>

namespace bergman {

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected,
                       const std::string& message)
    : std::runtime_error(message), offset_(offset), expected_(std::move(expected)) {}

namespace {

constexpr unsigned kUsesZ = 1u;
constexpr unsigned kUsesW = 2u;

unsigned variable_mask(const Node& n) {
  switch (n.kind) {
    case NodeKind::Const:
      return 0;
    case NodeKind::VarZ:
      return kUsesZ;
    case NodeKind::VarW:
      return kUsesW;
    default:
      break;
  }
  unsigned mask = 0;
  if (n.lhs) mask |= variable_mask(*n.lhs);
  if (n.rhs) mask |= variable_mask(*n.rhs);
  return mask;
}

bool contains_transcendental(const Node& n) {
  switch (n.kind) {
    case NodeKind::Re:
    case NodeKind::Im:
    case NodeKind::Abs:
    case NodeKind::Exp:
      return true;
    default:
      break;
  }
  return (n.lhs && contains_transcendental(*n.lhs)) ||
         (n.rhs && contains_transcendental(*n.rhs));
}

cplx ipow(cplx base, std::uint32_t exponent) {
  cplx result{1.0, 0.0};
  while (exponent > 0) {
    if (exponent & 1u) result *= base;
    base *= base;
    exponent >>= 1u;
  }
  return result;
}

cplx eval_node(const Node& n, cplx z, cplx w) {
  switch (n.kind) {
    case NodeKind::Const:
      return n.value;
    case NodeKind::VarZ:
      return z;
    case NodeKind::VarW:
      return w;
    case NodeKind::Conj:
      return std::conj(eval_node(*n.lhs, z, w));
    case NodeKind::Neg:
      return -eval_node(*n.lhs, z, w);
    case NodeKind::Add:
      return eval_node(*n.lhs, z, w) + eval_node(*n.rhs, z, w);
    case NodeKind::Sub:
      return eval_node(*n.lhs, z, w) - eval_node(*n.rhs, z, w);
    case NodeKind::Mul:
      return eval_node(*n.lhs, z, w) * eval_node(*n.rhs, z, w);
    case NodeKind::Pow:
      return ipow(eval_node(*n.lhs, z, w), n.exponent);
    case NodeKind::Re:
      return {eval_node(*n.lhs, z, w).real(), 0.0};
    case NodeKind::Im:
      return {eval_node(*n.lhs, z, w).imag(), 0.0};
    case NodeKind::Abs:
      return {std::abs(eval_node(*n.lhs, z, w)), 0.0};
    case NodeKind::Exp:
      return std::exp(eval_node(*n.lhs, z, w));
  }
  return {};
}

std::string format_real(double x) {
  if (x == 0.0) return "0";
  return fmt::format("{:.17g}", x);
}

std::string format_const(cplx c) {
  const double re = c.real();
  const double im = c.imag();
  if (im == 0.0 && !(re < 0.0)) return format_real(re);
  // The literal grammar has unsigned parts only; a negative real part is
  // written as the negation of a literal.
  if (re < 0.0) {
    const double nim = -im;
    return fmt::format("-({}{}{}i)", format_real(-re), nim < 0.0 ? "-" : "+",
                       format_real(std::abs(nim)));
  }
  return fmt::format("({}{}{}i)", format_real(re), im < 0.0 ? "-" : "+",
                     format_real(std::abs(im)));
}

void print_node(const Node& n, std::string& out) {
  auto unary = [&](std::string_view name) {
    out += name;
    out += '(';
    print_node(*n.lhs, out);
    out += ')';
  };
  auto binary = [&](std::string_view op) {
    out += '(';
    print_node(*n.lhs, out);
    out += op;
    print_node(*n.rhs, out);
    out += ')';
  };
  switch (n.kind) {
    case NodeKind::Const:
      out += format_const(n.value);
      return;
    case NodeKind::VarZ:
      out += 'z';
      return;
    case NodeKind::VarW:
      out += 'w';
      return;
    case NodeKind::Conj:
      return unary("conj");
    case NodeKind::Neg:
      return unary("-");
    case NodeKind::Add:
      return binary(" + ");
    case NodeKind::Sub:
      return binary(" - ");
    case NodeKind::Mul:
      return binary("*");
    case NodeKind::Pow:
      out += '(';
      print_node(*n.lhs, out);
      out += ")^";
      out += std::to_string(n.exponent);
      return;
    case NodeKind::Re:
      return unary("re");
    case NodeKind::Im:
      return unary("im");
    case NodeKind::Abs:
      return unary("abs");
    case NodeKind::Exp:
      return unary("exp");
  }
}

// ---------------------------------------------------------------------------
// Tokenizer and recursive-descent parser.

enum class Tok { Number, Ident, Plus, Minus, Star, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      while (i < s.size() && is_digit(s[i])) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && is_digit(s[i])) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && is_digit(s[j])) {
          i = j;
          while (i < s.size() && is_digit(s[i])) ++i;
        }
      }
      out.push_back({Tok::Number, start, std::string(s.substr(start, i - start))});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::Ident, start, std::string(s.substr(start, i - start))});
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '^': kind = Tok::Caret; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      default:
        throw ParseError(start, {}, fmt::format("unexpected character '{}' at offset {}", c, start));
    }
    out.push_back({kind, start, std::string(1, c)});
    ++i;
  }
  out.push_back({Tok::End, s.size(), ""});
  return out;
}

const std::vector<std::string>& base_starts() {
  static const std::vector<std::string> v{"z", "w", "number", "(", "-",
                                          "conj", "re", "im", "abs", "exp"};
  return v;
}

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += v[i];
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    if (peek().kind != Tok::End) fail({"+", "-", "*", "^", "end of input"});
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    throw ParseError(t.offset, expected,
                     fmt::format("syntax error at offset {}: unexpected {}; expected one of: {}",
                                 t.offset, describe(t), join(expected)));
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const NodeKind k = peek().kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
      ++pos_;
      lhs = make_binary(k, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (peek().kind == Tok::Star) {
      ++pos_;
      lhs = make_binary(NodeKind::Mul, lhs, factor());
    }
    return lhs;
  }

  NodePtr factor() {
    NodePtr b = base();
    if (peek().kind != Tok::Caret) return b;
    ++pos_;
    const Token& t = peek();
    const bool is_uint =
        t.kind == Tok::Number &&
        std::all_of(t.text.begin(), t.text.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (!is_uint) {
      throw ParseError(t.offset, {"nonnegative integer"},
                       fmt::format("exponent at offset {} is not a nonnegative integer literal",
                                   t.offset));
    }
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc{}) {
      throw ParseError(t.offset, {"nonnegative integer"},
                       fmt::format("exponent at offset {} is out of range", t.offset));
    }
    ++pos_;
    return make_pow(b, value);
  }

  // Length in tokens of a literal "(a+bi)" or "(-a+bi)" at the cursor, or 0.
  std::size_t complex_literal_length() const {
    if (peek().kind != Tok::LParen) return 0;
    const std::size_t s = peek(1).kind == Tok::Minus ? 1 : 0;
    const bool match = peek(1 + s).kind == Tok::Number &&
                       (peek(2 + s).kind == Tok::Plus || peek(2 + s).kind == Tok::Minus) &&
                       peek(3 + s).kind == Tok::Number && peek(4 + s).kind == Tok::Ident &&
                       peek(4 + s).text == "i" && peek(5 + s).kind == Tok::RParen;
    return match ? 6 + s : 0;
  }

  static double to_real(const Token& t) {
    double v = 0.0;
    std::istringstream in(t.text);
    in.imbue(std::locale::classic());
    in >> v;
    return v;
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail({what});
    ++pos_;
  }

  NodePtr base() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        ++pos_;
        return make_const({to_real(t), 0.0});
      case Tok::Minus:
        ++pos_;
        return make_unary(NodeKind::Neg, base());
      case Tok::LParen: {
        if (const std::size_t len = complex_literal_length()) {
          const std::size_t s = len - 6;
          const double re = (s ? -1.0 : 1.0) * to_real(peek(1 + s));
          const double sign = peek(2 + s).kind == Tok::Plus ? 1.0 : -1.0;
          const double im = to_real(peek(3 + s));
          pos_ += len;
          return make_const({re, sign * im});
        }
        ++pos_;
        NodePtr inner = expr();
        expect(Tok::RParen, ")");
        return inner;
      }
      case Tok::Ident: {
        if (t.text == "z") {
          ++pos_;
          return make_var_z();
        }
        if (t.text == "w") {
          ++pos_;
          return make_var_w();
        }
        static const std::map<std::string, NodeKind, std::less<>> funcs{
            {"conj", NodeKind::Conj}, {"re", NodeKind::Re},   {"im", NodeKind::Im},
            {"abs", NodeKind::Abs},   {"exp", NodeKind::Exp}};
        const auto it = funcs.find(t.text);
        if (it == funcs.end()) fail(base_starts());
        ++pos_;
        expect(Tok::LParen, "(");
        NodePtr arg = expr();
        expect(Tok::RParen, ")");
        return make_unary(it->second, arg);
      }
      default:
        fail(base_starts());
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------

NodePtr substitute(const NodePtr& n, const NodePtr& z_repl, const NodePtr& w_repl) {
  switch (n->kind) {
    case NodeKind::Const:
      return n;
    case NodeKind::VarZ:
      return z_repl;
    case NodeKind::VarW:
      return w_repl;
    case NodeKind::Pow:
      return make_pow(substitute(n->lhs, z_repl, w_repl), n->exponent);
    default:
      break;
  }
  if (n->rhs) {
    return make_binary(n->kind, substitute(n->lhs, z_repl, w_repl),
                       substitute(n->rhs, z_repl, w_repl));
  }
  return make_unary(n->kind, substitute(n->lhs, z_repl, w_repl));
}

Analyticity classify(const Node& n) {
  auto combine = [](Analyticity a, Analyticity b) {
    if (a == Analyticity::Constant) return b;
    if (b == Analyticity::Constant || a == b) return a;
    return Analyticity::General;
  };
  switch (n.kind) {
    case NodeKind::Const:
      return Analyticity::Constant;
    case NodeKind::VarZ:
      return Analyticity::Holomorphic;
    case NodeKind::VarW:
      return Analyticity::General;
    case NodeKind::Conj: {
      const Analyticity a = classify(*n.lhs);
      if (a == Analyticity::Holomorphic) return Analyticity::Antiholomorphic;
      if (a == Analyticity::Antiholomorphic) return Analyticity::Holomorphic;
      return a;
    }
    case NodeKind::Neg:
    case NodeKind::Exp:
    case NodeKind::Pow:
      return classify(*n.lhs);
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
      return combine(classify(*n.lhs), classify(*n.rhs));
    case NodeKind::Re:
    case NodeKind::Im:
    case NodeKind::Abs:
      return classify(*n.lhs) == Analyticity::Constant ? Analyticity::Constant : Analyticity::General;
  }
  return Analyticity::General;
}

using PolyMap = std::map<std::pair<std::uint32_t, std::uint32_t>, cplx>;

PolyMap poly_mul(const PolyMap& x, const PolyMap& y) {
  PolyMap out;
  for (const auto& [kx, cx] : x) {
    for (const auto& [ky, cy] : y) {
      out[{kx.first + ky.first, kx.second + ky.second}] += cx * cy;
    }
  }
  return out;
}

PolyMap poly_conj(const PolyMap& x) {
  PolyMap out;
  for (const auto& [k, c] : x) out[{k.second, k.first}] = std::conj(c);
  return out;
}

std::optional<PolyMap> expand_node(const Node& n) {
  switch (n.kind) {
    case NodeKind::Const:
      return PolyMap{{{0u, 0u}, n.value}};
    case NodeKind::VarZ:
      return PolyMap{{{1u, 0u}, cplx{1.0, 0.0}}};
    case NodeKind::Conj: {
      auto inner = expand_node(*n.lhs);
      if (!inner) return std::nullopt;
      return poly_conj(*inner);
    }
    case NodeKind::Re:
    case NodeKind::Im: {
      // re(p) = (p + conj p) / 2, im(p) = (p - conj p) / 2i
      auto inner = expand_node(*n.lhs);
      if (!inner) return std::nullopt;
      const cplx scale = n.kind == NodeKind::Re ? cplx{0.5, 0.0} : cplx{0.0, -0.5};
      const double sign = n.kind == NodeKind::Re ? 1.0 : -1.0;
      PolyMap out;
      for (const auto& [k, c] : *inner) out[k] += scale * c;
      for (const auto& [k, c] : poly_conj(*inner)) out[k] += sign * scale * c;
      return out;
    }
    case NodeKind::Neg: {
      auto inner = expand_node(*n.lhs);
      if (!inner) return std::nullopt;
      for (auto& [k, c] : *inner) c = -c;
      return inner;
    }
    case NodeKind::Add:
    case NodeKind::Sub: {
      auto x = expand_node(*n.lhs);
      if (!x) return std::nullopt;
      auto y = expand_node(*n.rhs);
      if (!y) return std::nullopt;
      const double sign = n.kind == NodeKind::Add ? 1.0 : -1.0;
      for (const auto& [k, c] : *y) (*x)[k] += sign * c;
      return x;
    }
    case NodeKind::Mul: {
      auto x = expand_node(*n.lhs);
      if (!x) return std::nullopt;
      auto y = expand_node(*n.rhs);
      if (!y) return std::nullopt;
      return poly_mul(*x, *y);
    }
    case NodeKind::Pow: {
      auto base = expand_node(*n.lhs);
      if (!base) return std::nullopt;
      PolyMap result{{{0u, 0u}, cplx{1.0, 0.0}}};
      std::uint32_t e = n.exponent;
      while (e > 0) {
        if (e & 1u) result = poly_mul(result, *base);
        e >>= 1u;
        if (e > 0) *base = poly_mul(*base, *base);
      }
      return result;
    }
    default:
      return std::nullopt;
  }
}

void flatten_sum(const NodePtr& n, bool negated, std::vector<std::pair<bool, NodePtr>>& out) {
  switch (n->kind) {
    case NodeKind::Add:
      flatten_sum(n->lhs, negated, out);
      flatten_sum(n->rhs, negated, out);
      return;
    case NodeKind::Sub:
      flatten_sum(n->lhs, negated, out);
      flatten_sum(n->rhs, !negated, out);
      return;
    case NodeKind::Neg:
      flatten_sum(n->lhs, !negated, out);
      return;
    default:
      out.emplace_back(negated, n);
  }
}

void flatten_product(const NodePtr& n, std::vector<NodePtr>& out) {
  if (n->kind == NodeKind::Mul) {
    flatten_product(n->lhs, out);
    flatten_product(n->rhs, out);
    return;
  }
  out.push_back(n);
}

NodePtr product_of(const std::vector<NodePtr>& factors) {
  if (factors.empty()) return make_const({1.0, 0.0});
  NodePtr acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = make_binary(NodeKind::Mul, acc, factors[i]);
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------

NodePtr make_const(cplx c) {
  return std::make_shared<const Node>(Node{NodeKind::Const, c, 0, nullptr, nullptr});
}

NodePtr make_var_z() {
  static const NodePtr z = std::make_shared<const Node>(Node{NodeKind::VarZ, {}, 0, nullptr, nullptr});
  return z;
}

NodePtr make_var_w() {
  static const NodePtr w = std::make_shared<const Node>(Node{NodeKind::VarW, {}, 0, nullptr, nullptr});
  return w;
}

NodePtr make_unary(NodeKind kind, NodePtr operand) {
  return std::make_shared<const Node>(Node{kind, {}, 0, std::move(operand), nullptr});
}

NodePtr make_binary(NodeKind kind, NodePtr lhs, NodePtr rhs) {
  return std::make_shared<const Node>(Node{kind, {}, 0, std::move(lhs), std::move(rhs)});
}

NodePtr make_pow(NodePtr base, std::uint32_t exponent) {
  return std::make_shared<const Node>(Node{NodeKind::Pow, {}, exponent, std::move(base), nullptr});
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == NodeKind::Const) return a.value == b.value;
  if (a.kind == NodeKind::Pow && a.exponent != b.exponent) return false;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !structurally_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !structurally_equal(*a.rhs, *b.rhs)) return false;
  return true;
}

SymbolExpr::SymbolExpr(NodePtr root) : root_(std::move(root)) {
  if (!root_) throw std::invalid_argument("SymbolExpr: null root");
  const unsigned mask = variable_mask(*root_);
  arity_ = (mask & kUsesW) ? Arity::TwoVariable : Arity::OneVariable;
  uses_z_ = (mask & kUsesZ) != 0;
  transcendental_ = contains_transcendental(*root_);
}

cplx SymbolExpr::eval(cplx z, std::optional<cplx> w) const {
  if (arity_ == Arity::TwoVariable && !w) {
    throw std::invalid_argument("eval: two-variable symbol needs a value for w");
  }
  return eval_node(*root_, z, w.value_or(cplx{}));
}

std::string SymbolExpr::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

SymbolExpr parse(std::string_view text) {
  Parser p(tokenize(text));
  return SymbolExpr(p.parse_all());
}

SymbolExpr slice_theta1(const SymbolExpr& e, double theta1) {
  if (!e.is_two_variable()) throw std::invalid_argument("slice_theta1: symbol is one-variable");
  return SymbolExpr(substitute(e.root(), make_const(std::polar(1.0, theta1)), make_var_z()));
}

SymbolExpr slice_theta2(const SymbolExpr& e, double theta2) {
  if (!e.is_two_variable()) throw std::invalid_argument("slice_theta2: symbol is one-variable");
  return SymbolExpr(substitute(e.root(), make_var_z(), make_const(std::polar(1.0, theta2))));
}

SymbolExpr swap_variables(const SymbolExpr& e) {
  return SymbolExpr(substitute(e.root(), make_var_w(), make_var_z()));
}

cplx MonomialDecomposition::eval(cplx z) const {
  cplx acc{};
  const cplx zb = std::conj(z);
  for (const auto& t : terms) acc += t.c * ipow(z, t.a) * ipow(zb, t.b);
  return acc;
}

std::uint32_t MonomialDecomposition::degree() const {
  std::uint32_t d = 0;
  for (const auto& t : terms) d = std::max(d, t.a + t.b);
  return d;
}

Analyticity analyticity(const SymbolExpr& e) {
  if (e.is_two_variable()) return Analyticity::General;
  return classify(*e.root());
}

std::optional<MonomialDecomposition> expand_polynomial(const SymbolExpr& e) {
  if (e.is_two_variable()) return std::nullopt;
  auto poly = expand_node(*e.root());
  if (!poly) return std::nullopt;
  MonomialDecomposition out;
  for (auto it = poly->rbegin(); it != poly->rend(); ++it) {
    if (it->second != cplx{}) out.terms.push_back({it->first.first, it->first.second, it->second});
  }
  return out;
}

std::optional<std::vector<SeparableTerm>> split_separable(const SymbolExpr& e) {
  std::vector<std::pair<bool, NodePtr>> summands;
  flatten_sum(e.root(), false, summands);
  std::vector<SeparableTerm> out;
  out.reserve(summands.size());
  for (const auto& [negated, node] : summands) {
    std::vector<NodePtr> factors;
    flatten_product(node, factors);
    std::vector<NodePtr> zs;
    std::vector<NodePtr> ws;
    for (const auto& f : factors) {
      const unsigned mask = variable_mask(*f);
      if (mask == (kUsesZ | kUsesW)) return std::nullopt;
      if (mask == kUsesW) {
        ws.push_back(substitute(f, make_var_z(), make_var_z()));
      } else {
        zs.push_back(f);
      }
    }
    NodePtr g = product_of(zs);
    if (negated) g = make_unary(NodeKind::Neg, g);
    out.push_back({SymbolExpr(g), SymbolExpr(product_of(ws))});
  }
  return out;
}

}  // namespace bergman
