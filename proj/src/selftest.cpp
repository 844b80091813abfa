#include "bergman/selftest.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "bergman/essential_spectrum.hpp"
#include "bergman/spectra.hpp"
#include "bergman/toeplitz.hpp"

namespace bergman {

namespace {

CheckResult check(std::string name, const std::function<std::string()>& body) {
  CheckResult r{std::move(name), false, {}};
  try {
    r.detail = body();
    r.passed = r.detail.empty();
  } catch (const std::exception& ex) {
    r.detail = fmt::format("exception: {}", ex.what());
  }
  return r;
}

std::string within(double value, double bound, const char* what) {
  if (value <= bound) return {};
  return fmt::format("{} = {:.3e} exceeds {:.3e}", what, value, bound);
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;

  out.push_back(check("gram", [] {
    const auto g = gram_matrix(BasisSpec{30}, build_quadrature(64, 256));
    const auto id = Eigen::MatrixXcd::Identity(30, 30);
    return within((g - id).cwiseAbs().maxCoeff(), 1e-10, "max |G - I|");
  }));

  out.push_back(check("monomial-entries", [&rng] {
    const auto rule = build_quadrature(64, 256);
    std::uniform_int_distribution<std::size_t> small(0, 4), index(0, 20);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t a = small(rng), b = small(rng), j = index(rng), k = index(rng);
      const auto e = parse(fmt::format("z^{}*conj(z)^{}", a, b));
      worst = std::max(worst, std::abs(matrix_entry_1d(e, j, k, rule) - monomial_entry_exact(a, b, j, k)));
    }
    return within(worst, 1e-10, "max quadrature error");
  }));

  out.push_back(check("kronecker", [] {
    const auto rule = build_quadrature(16, 32);
    const auto tz = build_toeplitz_1d(parse("z"), 4, rule).entries;
    const auto id = Eigen::MatrixXcd::Identity(4, 4);
    const auto prod = build_toeplitz_2d(parse("z*w"), 4, rule).entries;
    const auto sum_fast = build_toeplitz_2d(parse("z+w"), 4, rule).entries;
    const auto sum_direct = build_toeplitz_2d(parse("z+w"), 4, rule, AssemblyPath::ForceQuadrature).entries;
    const double e1 = (prod - kron(tz, tz)).cwiseAbs().maxCoeff();
    const double e2 = (sum_fast - (kron(tz, id) + kron(id, tz))).cwiseAbs().maxCoeff();
    const double e3 = (sum_fast - sum_direct).cwiseAbs().maxCoeff();
    return within(std::max({e1, e2, e3}), 1e-9, "max Kronecker mismatch");
  }));

  out.push_back(check("slice-consistency", [&rng] {
    const auto f = parse("z*conj(w) + exp(w)*abs(z) - (0.5-0.25i)*z^2");
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi), radius(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const double t = angle(rng);
      const cplx zeta = std::polar(radius(rng), angle(rng));
      const cplx u = std::polar(1.0, t);
      worst = std::max(worst, std::abs(slice_theta1(f, t).eval(zeta) - f.eval(u, zeta)));
      worst = std::max(worst, std::abs(slice_theta2(f, t).eval(zeta) - f.eval(zeta, u)));
    }
    return within(worst, 1e-12, "max slice mismatch");
  }));

  out.push_back(check("shift-pipeline-1d", [] {
    const auto region = spectrum_1d_estimate(parse("z"), SpectrumParams{});
    return within(hausdorff_distance(region, disc_mesh({0.0, 0.0}, 1.0, 0.02)), 0.15, "Hausdorff to disc");
  }));

  out.push_back(check("shift-pipeline-2d", [] {
    EssentialParams p;
    const auto r = essential_spectrum_2d(parse("z"), p);
    return within(hausdorff_distance(r.union_region, disc_mesh({0.0, 0.0}, 1.0, 0.02)), 0.15,
                  "Hausdorff to disc");
  }));

  return out;
}

}  // namespace bergman
