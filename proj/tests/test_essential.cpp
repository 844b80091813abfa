#include <doctest.h>

#include <numbers>

#include "bergman/errors.hpp"
#include "bergman/essential_spectrum.hpp"

using namespace bergman;

namespace {

EssentialParams fast_params() {
  EssentialParams p;
  p.slice.n = 60;
  p.slice.grid.n_re = 81;
  p.slice.grid.n_im = 81;
  p.slice.m_boundary = 256;
  p.m_theta = 16;
  p.adaptive = false;
  p.threads = 2;
  return p;
}

}  // namespace

TEST_CASE("theta grid") {
  const ThetaGrid g(8);
  CHECK(g.size() == 8);
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(2) == doctest::Approx(std::numbers::pi / 2));
  CHECK_THROWS_AS(ThetaGrid(3), std::invalid_argument);
}

TEST_CASE("theta1 family of z is the unit circle") {
  const auto slices = slice_spectra_family(parse("z"), SliceFamily::Theta1, ThetaGrid(8), fast_params().slice);
  REQUIRE(slices.size() == 8);
  for (const auto& s : slices) {
    const cplx c = std::polar(1.0, s.theta);
    CHECK(hausdorff_distance(s.region, RegionApprox{{c}, 0.0, ""}) <= s.region.h + 1e-3);
  }
}

TEST_CASE("theta2 family of z is the closed disc") {
  const auto p = fast_params().slice;
  const auto slices = slice_spectra_family(parse("z"), SliceFamily::Theta2, ThetaGrid(4), p);
  for (const auto& s : slices) CHECK(hausdorff_distance(s.region, disc_mesh(0.0, 1.0, 0.02)) <= 0.15);
}

TEST_CASE("theta1 slice of zw at zero is the closed disc") {
  const auto slices = slice_spectra_family(parse("z*w"), SliceFamily::Theta1, ThetaGrid(4), fast_params().slice);
  CHECK(slices[0].theta == 0.0);
  CHECK(hausdorff_distance(slices[0].region, disc_mesh(0.0, 1.0, 0.02)) <= 0.15);
}

TEST_CASE("constant symbol") {
  const auto r = essential_spectrum_2d(parse("(0+1i)"), fast_params());
  CHECK(hausdorff_distance(r.union_region, RegionApprox{{{0, 1}}, 0.0, ""}) <= r.union_region.h + 1e-3);
}

TEST_CASE("union for z is the closed unit disc") {
  const auto r = essential_spectrum_2d(parse("z"), fast_params());
  CHECK(hausdorff_distance(r.union_region, disc_mesh(0.0, 1.0, 0.02)) <= 0.15);
  CHECK(r.slices_theta1.size() == 16);
  CHECK(r.slices_theta2.size() == 16);
  CHECK(r.params.m_theta == 16);
}

TEST_CASE("union for z+w is the disc of radius two") {
  const auto r = essential_spectrum_2d(parse("z+w"), fast_params());
  CHECK(hausdorff_distance(r.union_region, disc_mesh(0.0, 2.0, 0.02)) <= 0.2);
}

TEST_CASE("every slice contains its boundary curve") {
  const auto p = fast_params();
  const auto e = parse("z*conj(w) + (0.3+0i)*w^2");
  const auto r = essential_spectrum_2d(e, p);
  for (const auto& s : r.slices_theta1) {
    PointIndex idx(s.region.points);
    for (const auto& q : essential_spectrum_1d(slice_theta1(e, s.theta), p.slice.m_boundary).points)
      CHECK(idx.nearest_distance(q) <= s.region.h);
  }
}

TEST_CASE("refining the theta grid never shrinks the union") {
  auto p = fast_params();
  const auto e = parse("z*w + (0.5+0i)*conj(z)");
  const auto coarse = essential_spectrum_2d(e, p);
  p.m_theta = 32;
  const auto fine = essential_spectrum_2d(e, p);
  CHECK(directed_hausdorff(coarse.union_region.points, fine.union_region.points) <= 1e-12);
}

TEST_CASE("swapping variables leaves the union unchanged") {
  const auto p = fast_params();
  const auto e = parse("z + (0.5+0i)*w^2");
  const auto a = essential_spectrum_2d(e, p);
  const auto b = essential_spectrum_2d(swap_variables(e), p);
  CHECK(hausdorff_distance(a.union_region, b.union_region) <= a.union_region.h);
}

TEST_CASE("w-free symbols reproduce the one-variable estimate") {
  auto p = fast_params();
  const auto g = parse("z^2");
  const auto r = essential_spectrum_2d(g, p);
  SpectrumParams sp = p.slice;
  sp.grid = r.params.grid;
  const auto one = spectrum_1d_estimate(g, sp);
  CHECK(hausdorff_distance(r.union_region, one) <= r.union_region.h + sp.grid.spacing());
}

TEST_CASE("adaptive refinement is recorded") {
  auto p = fast_params();
  p.adaptive = true;
  const auto r = essential_spectrum_2d(parse("z*w"), p);
  CHECK(r.params.requested.m_theta == 16);
  CHECK((r.params.m_theta == 16 || r.params.m_theta == 32));
  CHECK(r.params.refined == (r.params.m_theta == 32));
  CHECK(r.params.refinement_change >= 0.0);
}

TEST_CASE("two-dimensional section probes for z") {
  const auto p = fast_params();
  const auto r = essential_spectrum_2d(parse("z"), p);
  const auto report = verify_against_2d_sections(parse("z"), r, 16, {2.0, 0.5}, build_quadrature(16, 32));
  REQUIRE(report.probes.size() == 2);
  CHECK_FALSE(report.probes[0].inside);
  CHECK(report.probes[0].sigma_full >= 1.0 - 1e-9);
  CHECK(report.probes[0].sigma_half >= 1.0 - 1e-9);
  CHECK(report.probes[0].status == ProbeStatus::Consistent);
  CHECK(report.probes[1].inside);
  CHECK(report.probes[1].sigma_full <= 1e-3);
  CHECK(report.probes[1].status == ProbeStatus::Consistent);
}

TEST_CASE("constant probe is exactly singular") {
  const auto r = essential_spectrum_2d(parse("(0+1i)"), fast_params());
  const auto report = verify_against_2d_sections(parse("(0+1i)"), r, 4, {cplx{0, 1}}, build_quadrature(8, 8));
  CHECK(report.probes[0].sigma_full == 0.0);
  CHECK(report.probes[0].status == ProbeStatus::Consistent);
}

TEST_CASE("probes near the union boundary are refused") {
  const auto r = essential_spectrum_2d(parse("z"), fast_params());
  CHECK_THROWS_AS(verify_against_2d_sections(parse("z"), r, 4, {1.0}, build_quadrature(8, 8)), ProbeTooClose);
}
