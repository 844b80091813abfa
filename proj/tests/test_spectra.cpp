#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "bergman/errors.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/region.hpp"
#include "bergman/spectra.hpp"
#include "bergman/toeplitz.hpp"

using namespace bergman;

namespace {

const QuadratureRule& rule() {
  static const QuadratureRule r = build_quadrature(64, 256);
  return r;
}

Eigen::MatrixXcd section(const char* text, std::size_t n) { return build_toeplitz_1d(parse(text), n, rule()).entries; }

// Brute-force directed Hausdorff distance, used as an oracle for the indexed version.
double brute_directed(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double worst = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b) best = std::min(best, std::abs(p - q));
    worst = std::max(worst, best);
  }
  return worst;
}

// Distance from every eigenvalue of `b` to the nearest eigenvalue of `a` after mapping.
template <class Map>
double spectral_mismatch(const SpectrumApprox& a, const SpectrumApprox& b, Map map) {
  double worst = 0.0;
  for (const auto& p : a.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b.points) best = std::min(best, std::abs(map(p) - q));
    worst = std::max(worst, best);
  }
  return worst;
}

const char* const kCorpus[] = {"1", "z", "conj(z)", "re(z)", "z*conj(z)", "(z+conj(z))^2", "exp(z)"};

}  // namespace

TEST_CASE("Hausdorff distance examples") {
  RegionApprox a{{{0, 0}, {1, 0}, {0, 1}}, 0.1, "test"};
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK(hausdorff_distance(RegionApprox{{{0, 0}}, 0.1, ""}, RegionApprox{{{3, 0}}, 0.1, ""}) == 3.0);
  CHECK_THROWS_AS(hausdorff_distance(a, RegionApprox{}), std::invalid_argument);

  RegionApprox circle{{}, 0.0, "circle"};
  for (int k = 0; k < 360; ++k) circle.points.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / 360));
  CHECK(hausdorff_distance(circle, disc_mesh(0.0, 1.0, 0.05)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("indexed Hausdorff matches brute force") {
  const auto disc = disc_mesh({0.3, -0.2}, 0.7, 0.07);
  RegionApprox ring{{}, 0.0, ""};
  for (int k = 0; k < 97; ++k) ring.points.push_back(std::polar(1.3, 0.37 * k) + cplx{0.1, 0.05});
  const double expect = std::max(brute_directed(disc.points, ring.points), brute_directed(ring.points, disc.points));
  CHECK(hausdorff_distance(disc, ring) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(directed_hausdorff(disc.points, ring.points) == doctest::Approx(brute_directed(disc.points, ring.points)).epsilon(1e-14));
}

TEST_CASE("disc mesh covers the disc at its resolution") {
  const auto m = disc_mesh(0.0, 1.0, 0.02);
  CHECK(m.h == 0.02);
  for (const auto& p : m.points) CHECK(std::abs(p) <= 1.0 + 1e-12);
  PointIndex idx(m.points);
  for (int k = 0; k < 200; ++k) CHECK(idx.nearest_distance(std::polar(0.013 * (k % 77), 0.7 * k)) <= 0.02);
}

TEST_CASE("region accumulator deduplicates") {
  RegionAccumulator acc(0.1);
  acc.add({0.0, 0.0});
  acc.add({0.001, 0.001});
  acc.add({1.0, 0.0});
  const auto r = std::move(acc).finish("x");
  CHECK(r.points.size() == 2);
  CHECK(r.method == "x");
}

TEST_CASE("eigenvalue examples") {
  const auto id = eigenvalues(build_toeplitz_1d(parse("1"), 5, rule()));
  REQUIRE(id.points.size() == 5);
  for (const auto& p : id.points) CHECK(std::abs(p - 1.0) < 1e-12);

  const auto shift = eigenvalues(build_toeplitz_1d(parse("z"), 50, rule()));
  for (const auto& p : shift.points) CHECK(std::abs(p) <= 1e-8);

  const auto diag = eigenvalues(build_toeplitz_1d(parse("z*conj(z)"), 3, rule()));
  REQUIRE(diag.points.size() == 3);
  CHECK(std::abs(diag.points[0] - 0.5) < 1e-12);
  CHECK(std::abs(diag.points[1] - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(diag.points[2] - 0.75) < 1e-12);
}

TEST_CASE("eigenvalue residuals respect the declared bound") {
  for (const char* text : kCorpus) {
    CAPTURE(text);
    const auto m = section(text, 30);
    const auto s = eigenvalues(m);
    const double norm = std::max(1.0, m.operatorNorm());
    for (double r : s.residuals) CHECK(r <= s.tol * norm);
  }
}

TEST_CASE("smallest singular value examples") {
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(6, 6);
  CHECK(smallest_singular_value(id, 1.0) == doctest::Approx(0.0));
  CHECK(smallest_singular_value(id, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  const double s = smallest_singular_value(section("z", 40), 0.5);
  CHECK(s > 0.0);
  CHECK(s <= std::pow(0.5, 40) + 1e-10);
}

TEST_CASE("shifted sigma_min agrees with the SVD") {
  for (const char* text : {"z", "exp(z)", "(z+conj(z))^2", "z^2 + (0.3+0.2i)*conj(z)"}) {
    CAPTURE(text);
    const auto m = section(text, 40);
    const ShiftedSigmaMin s(m);
    for (cplx lambda : {cplx{0.2, 0.1}, cplx{0.9, 0}, cplx{1.0, 0.4}, cplx{-1.3, 1.1}, cplx{2.5, 0}}) {
      const double ref = smallest_singular_value(m, lambda);
      CHECK(std::abs(s.value(lambda) - ref) <= 1e-8 * std::max(1.0, ref) + 1e-12);
      CHECK(s.at_most(lambda, 1e-3) == (ref <= 1e-3));
      CHECK(s.lower_bound(lambda) <= ref + 1e-12);
    }
  }
}

TEST_CASE("pseudospectrum of the identity") {
  GridSpec g{0.0, 2.0, 0.0, 2.0, 41, 41};
  const auto ps = pseudospectrum(Eigen::MatrixXcd::Identity(4, 4), g, 0.1);
  for (std::size_t f = 0; f < g.size(); ++f) CHECK(ps.inside(f) == (std::abs(g.node(f) - 1.0) <= 0.1));
}

TEST_CASE("pseudospectrum of a diagonal matrix") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d(0, 0) = 0.5;
  d(1, 1) = 2.0 / 3.0;
  d(2, 2) = 0.75;
  GridSpec g{0.4, 0.85, -0.05, 0.05, 91, 21};
  const auto ps = pseudospectrum(d, g, 0.01);
  for (std::size_t f = 0; f < g.size(); ++f) {
    const cplx l = g.node(f);
    const double dist = std::min({std::abs(l - 0.5), std::abs(l - 2.0 / 3.0), std::abs(l - 0.75)});
    CHECK(ps.values[f] == doctest::Approx(dist).epsilon(1e-10));
  }
}

TEST_CASE("pseudospectrum of the shift section") {
  const auto m = section("z", 120);
  GridSpec g{-1.5, 1.5, -1.5, 1.5, 61, 61};
  const auto ps = pseudospectrum(m, g, 1e-3, 4);
  for (std::size_t f = 0; f < g.size(); ++f) {
    const double r = std::abs(g.node(f));
    if (r <= 0.9) CHECK(ps.inside(f));
    if (r >= 1.1) CHECK_FALSE(ps.inside(f));
  }
}

TEST_CASE("pseudospectra are monotone in epsilon") {
  const auto m = section("exp(z)", 40);
  GridSpec g{-1.0, 3.5, -2.0, 2.0, 41, 37};
  const auto small = pseudospectrum(m, g, 1e-4);
  const auto large = pseudospectrum(m, g, 1e-2);
  const auto a = small.indicator();
  const auto b = large.indicator();
  CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
}

TEST_CASE("threaded pseudospectrum is identical to serial") {
  const auto m = section("z^2 + (0.3+0.2i)*conj(z)", 30);
  GridSpec g{-1.2, 1.2, -1.2, 1.2, 31, 29};
  CHECK(pseudospectrum(m, g, 1e-3, 1).values == pseudospectrum(m, g, 1e-3, 3).values);
}

TEST_CASE("boundary curve examples") {
  const auto c = essential_spectrum_1d(parse("(0.2+0.7i)"), 32);
  for (const auto& p : c.points) CHECK(std::abs(p - cplx{0.2, 0.7}) < 1e-15);

  const auto circle = essential_spectrum_1d(parse("z"), 8);
  REQUIRE(circle.points.size() == 8);
  for (const auto& p : circle.points) CHECK(std::abs(std::abs(p) - 1.0) <= 1e-12);

  for (const auto& p : essential_spectrum_1d(parse("z*conj(z)"), 64).points) CHECK(std::abs(p - 1.0) <= 1e-12);
  CHECK_THROWS_AS(essential_spectrum_1d(parse("z"), 4), std::invalid_argument);
}

TEST_CASE("winding number examples") {
  CHECK(winding_number(parse("z"), 0.0, 256) == 1);
  CHECK(winding_number(parse("z"), 2.0, 256) == 0);
  CHECK(winding_number(parse("z^2"), 0.0, 256) == 2);
  CHECK(winding_number(parse("conj(z)"), 0.0, 256) == -1);
  CHECK(winding_number(parse("z^3"), {0.2, -0.1}, 256) == 3);
  CHECK_THROWS_AS(winding_number(parse("z"), 1.0, 256), IllConditionedWinding);
  CHECK_THROWS_AS(winding_number(parse("z"), {0.0, 0.999}, 256), RefusedDiagnostic);
}

TEST_CASE("winding grid matches pointwise winding numbers") {
  const auto e = parse("z^2 + (0.4+0.1i)*conj(z)");
  const auto curve = essential_spectrum_1d(e, 512);
  GridSpec g{-1.6, 1.6, -1.6, 1.6, 33, 33};
  const auto w = winding_grid(curve.points, curve.h, g);
  for (std::size_t f = 0; f < g.size(); ++f) {
    std::optional<int> ref;
    try {
      ref = winding_number(e, g.node(f), 512);
    } catch (const RefusedDiagnostic&) {
    }
    if (w[f] && ref) CHECK(*w[f] == *ref);
    if (!ref) CHECK_FALSE(w[f]);
  }
}

TEST_CASE("spectrum estimate of a constant") {
  SpectrumParams p;
  p.n = 20;
  p.grid = GridSpec{-0.5, 0.5, -0.5, 0.5, 101, 101};
  const auto r = spectrum_1d_estimate(parse("(0.1-0.2i)"), p);
  CHECK(hausdorff_distance(r, RegionApprox{{{0.1, -0.2}}, 0.0, ""}) <= p.grid.spacing() + p.eps);
}

TEST_CASE("spectrum estimate of the shift is the closed disc") {
  const auto est = spectrum_1d_estimate_detailed(parse("z"), SpectrumParams{});
  CHECK(hausdorff_distance(est.region, disc_mesh(0.0, 1.0, 0.02)) <= 0.15);
  CHECK(est.boundary_points > 0);
}

TEST_CASE("spectrum estimate of exp(z) is the image of the disc") {
  SpectrumParams p;
  p.grid = GridSpec{-0.5, 3.2, -2.2, 2.2, 121, 145};
  const auto e = parse("exp(z)");
  const auto r = spectrum_1d_estimate(e, p);
  CHECK(hausdorff_distance(r, image_of_disc(e, 0.02)) <= 0.15);
}

TEST_CASE("boundary curve lies inside the estimate") {
  SpectrumParams p;
  p.n = 60;
  p.grid = GridSpec{-2.0, 2.0, -2.0, 2.0, 81, 81};
  for (const char* text : {"z", "(z+conj(z))^2", "z^2 + (0.3+0.2i)*conj(z)"}) {
    CAPTURE(text);
    const auto e = parse(text);
    const auto r = spectrum_1d_estimate(e, p);
    PointIndex idx(r.points);
    for (const auto& q : essential_spectrum_1d(e, p.m_boundary).points) CHECK(idx.nearest_distance(q) <= r.h);
  }
}

TEST_CASE("translation, scaling and conjugation of section spectra") {
  const cplx c{0.4, -0.3};
  for (const char* text : kCorpus) {
    CAPTURE(text);
    const std::string s(text);
    const auto base = eigenvalues(section(text, 24));
    const auto shifted = eigenvalues(section(("(" + s + ") + (0.4-0.3i)").c_str(), 24));
    const auto scaled = eigenvalues(section(("(0.4-0.3i)*(" + s + ")").c_str(), 24));
    const auto conj = eigenvalues(section(("conj(" + s + ")").c_str(), 24));
    const double tol = 1e-8;
    CHECK(spectral_mismatch(base, shifted, [&](cplx p) { return p + c; }) <= tol);
    CHECK(spectral_mismatch(base, scaled, [&](cplx p) { return c * p; }) <= tol);
    CHECK(spectral_mismatch(base, conj, [](cplx p) { return std::conj(p); }) <= tol);
  }
}

TEST_CASE("real symbols have real section spectra") {
  for (const char* text : {"re(z)", "z*conj(z)", "(z+conj(z))^2", "abs(z)"}) {
    CAPTURE(text);
    for (const auto& p : eigenvalues(section(text, 30)).points) CHECK(std::abs(p.imag()) <= 1e-9);
  }
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS((GridSpec{1.0, -1.0, -1.0, 1.0, 10, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{-1.0, 1.0, -1.0, 1.0, 1, 10}.validate()), std::invalid_argument);
  GridSpec g{-1.0, 1.0, 0.0, 2.0, 3, 5};
  CHECK(g.node(0) == cplx{-1.0, 0.0});
  CHECK(g.node(g.size() - 1) == cplx{1.0, 2.0});
  CHECK(g.node(1, 2) == cplx{1.0, 0.5});
}
