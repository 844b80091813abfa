#include <doctest.h>

#include <numbers>
#include <random>

#include "bergman/symbol_expr.hpp"

using namespace bergman;

namespace {

constexpr double kPi = std::numbers::pi;

cplx random_disc_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(std::sqrt(u(rng)), 2.0 * kPi * u(rng));
}

const char* const kCorpus[] = {
    "1", "z", "conj(z)", "re(z)", "z*conj(z)", "(z+conj(z))^2", "exp(z)",
    "z*conj(z) + (0.5+0i)*w", "abs(z - w)^2", "-(z*w) + im(w)*(0-2.5i)", "exp(conj(w))*z^3",
};

}  // namespace

TEST_CASE("parse single variable") {
  const auto e = parse("z");
  CHECK(e.root()->kind == NodeKind::VarZ);
  CHECK(e.arity() == Arity::OneVariable);
}

TEST_CASE("parse mixed two-variable expression") {
  const auto e = parse("z*conj(z) + (0.5+0i)*w");
  CHECK(e.arity() == Arity::TwoVariable);
  const auto expected = make_binary(
      NodeKind::Add, make_binary(NodeKind::Mul, make_var_z(), make_unary(NodeKind::Conj, make_var_z())),
      make_binary(NodeKind::Mul, make_const({0.5, 0.0}), make_var_w()));
  CHECK(structurally_equal(*e.root(), *expected));
}

TEST_CASE("negative and non-integer exponents are rejected") {
  CHECK_THROWS_AS(parse("z^(-1)"), ParseError);
  CHECK_THROWS_AS(parse("z^1.5"), ParseError);
  CHECK_THROWS_AS(parse("z^-2"), ParseError);
}

TEST_CASE("parse errors carry the offset") {
  try {
    parse("z + * w");
    FAIL("expected a parse error");
  } catch (const ParseError& ex) {
    CHECK(ex.offset() == 4);
    CHECK_FALSE(ex.expected().empty());
  }
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("z)"), ParseError);
  CHECK_THROWS_AS(parse("i*z"), ParseError);
  CHECK_THROWS_AS(parse("sin(z)"), ParseError);
  CHECK_THROWS_AS(parse("z/w"), ParseError);
}

TEST_CASE("eval examples") {
  CHECK(std::abs(parse("z^2").eval(0.5) - 0.25) < 1e-15);
  CHECK(std::abs(parse("conj(z)*w").eval({0, 1}, cplx{0, 2}) - 2.0) < 1e-15);
  CHECK(std::abs(parse("abs(z)").eval(-0.3) - 0.3) < 1e-15);
  CHECK_THROWS_AS(parse("z+w").eval(0.1), std::invalid_argument);
}

TEST_CASE("arity matches variable usage") {
  CHECK(parse("w^2").is_two_variable());
  CHECK_FALSE(parse("w^2").uses_z());
  CHECK_FALSE(parse("(1+2i)*z").is_two_variable());
  CHECK(parse("exp(z)").has_transcendental());
  CHECK_FALSE(parse("z*conj(z)").has_transcendental());
}

TEST_CASE("evaluation is finite on the closed bi-disc") {
  std::mt19937_64 rng(7);
  for (const char* text : kCorpus) {
    const auto e = parse(text);
    for (int i = 0; i < 50; ++i) {
      const cplx v = e.eval(random_disc_point(rng), random_disc_point(rng));
      CHECK(std::isfinite(v.real()));
      CHECK(std::isfinite(v.imag()));
    }
  }
}

TEST_CASE("print and parse round-trip") {
  std::mt19937_64 rng(11);
  for (const char* text : kCorpus) {
    CAPTURE(text);
    const auto e = parse(text);
    const auto back = parse(e.to_string());
    CHECK(structurally_equal(*e.root(), *back.root()));
    for (int i = 0; i < 100; ++i) {
      const cplx z = random_disc_point(rng), w = random_disc_point(rng);
      CHECK(std::abs(e.eval(z, w) - back.eval(z, w)) <= 1e-12);
    }
  }
}

TEST_CASE("theta1 slices") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const cplx zeta = random_disc_point(rng);
    CHECK(std::abs(slice_theta1(parse("z*w"), 0.0).eval(zeta) - zeta) < 1e-15);
    CHECK(std::abs(slice_theta1(parse("z+w"), kPi).eval(zeta) - (zeta - 1.0)) < 1e-15);
    CHECK(std::abs(slice_theta1(parse("w^2"), 1.3).eval(zeta) - zeta * zeta) < 1e-15);
  }
  CHECK_THROWS(slice_theta1(parse("z"), 0.0));
}

TEST_CASE("theta2 slices") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const cplx zeta = random_disc_point(rng);
    CHECK(std::abs(slice_theta2(parse("z*w"), 0.0).eval(zeta) - zeta) < 1e-15);
    CHECK(std::abs(slice_theta2(parse("conj(w)"), kPi / 2).eval(zeta) - cplx{0, -1}) < 1e-15);
  }
  CHECK_THROWS(slice_theta2(parse("z"), 2.0));
}

TEST_CASE("slice consistency on random points") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (const char* text : {"z*conj(w) + exp(w)*abs(z)", "abs(z - w)^2", "-(z*w) + im(w)*(0-2.5i)"}) {
    const auto e = parse(text);
    for (int i = 0; i < 100; ++i) {
      const double t = angle(rng);
      const cplx zeta = random_disc_point(rng), u = std::polar(1.0, t);
      CHECK(std::abs(slice_theta1(e, t).eval(zeta) - e.eval(u, zeta)) <= 1e-13);
      CHECK(std::abs(slice_theta2(e, t).eval(zeta) - e.eval(zeta, u)) <= 1e-13);
    }
  }
}

TEST_CASE("swap_variables exchanges z and w") {
  const auto e = parse("z*conj(w) + w^2");
  const auto s = swap_variables(e);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    const cplx z = random_disc_point(rng), w = random_disc_point(rng);
    CHECK(std::abs(s.eval(z, w) - e.eval(w, z)) < 1e-15);
  }
}

TEST_CASE("expand_polynomial examples") {
  auto d = expand_polynomial(parse("z*conj(z)"));
  REQUIRE(d);
  REQUIRE(d->terms.size() == 1);
  CHECK(d->terms[0].a == 1);
  CHECK(d->terms[0].b == 1);
  CHECK(d->terms[0].c == cplx{1, 0});

  d = expand_polynomial(parse("(z+conj(z))^2"));
  REQUIRE(d);
  REQUIRE(d->terms.size() == 3);
  CHECK((d->terms[0].a == 2 && d->terms[0].b == 0 && d->terms[0].c == cplx{1, 0}));
  CHECK((d->terms[1].a == 1 && d->terms[1].b == 1 && d->terms[1].c == cplx{2, 0}));
  CHECK((d->terms[2].a == 0 && d->terms[2].b == 2 && d->terms[2].c == cplx{1, 0}));
  CHECK(d->degree() == 2);

  CHECK_FALSE(expand_polynomial(parse("exp(z)")));
  CHECK_FALSE(expand_polynomial(parse("z*w")));
  CHECK(expand_polynomial(parse("z - z"))->terms.empty());
}

TEST_CASE("expansion matches evaluation") {
  std::mt19937_64 rng(19);
  for (const char* text : {"(z+conj(z))^2", "re(z)*im(z)", "(-0.4+0.3i)*z", "(1+2i)*(z-conj(z))^3 - 4", "abs(z)^2*z"}) {
    CAPTURE(text);
    const auto e = parse(text);
    const auto d = expand_polynomial(e);
    if (std::string_view(text) == "abs(z)^2*z") {
      CHECK_FALSE(d);
      continue;
    }
    REQUIRE(d);
    for (int i = 0; i < 100; ++i) {
      const cplx z = random_disc_point(rng);
      CHECK(std::abs(d->eval(z) - e.eval(z)) <= 1e-12);
    }
  }
}

TEST_CASE("separable splitting") {
  auto t = split_separable(parse("z*w + 2*conj(z) - w^2"));
  REQUIRE(t);
  CHECK(t->size() == 3);
  t = split_separable(parse("z"));
  REQUIRE(t);
  CHECK(t->size() == 1);
  CHECK_FALSE(split_separable(parse("abs(z - w)")));
  CHECK_FALSE(split_separable(parse("(z+w)^2")));
}
