#include "bergman/essential_spectrum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <tuple>
#include <map>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"
#include "bergman/toeplitz.hpp"

namespace bergman {

namespace {

SymbolExpr slice_symbol(const SymbolExpr& e, SliceFamily which, double theta) {
  if (e.is_two_variable()) {
    return which == SliceFamily::Theta1 ? slice_theta1(e, theta) : slice_theta2(e, theta);
  }
  // f(z, w) = g(z): the theta1 slices are the constants g(e^{i theta}).
  if (which == SliceFamily::Theta1) return SymbolExpr(make_const(e.eval(std::polar(1.0, theta))));
  return e;
}

std::vector<SliceRegion> interleave(const std::vector<SliceRegion>& even, const std::vector<SliceRegion>& odd) {
  std::vector<SliceRegion> out;
  out.reserve(even.size() + odd.size());
  for (std::size_t j = 0; j < even.size(); ++j) {
    out.push_back(even[j]);
    if (j < odd.size()) out.push_back(odd[j]);
  }
  return out;
}

std::vector<SliceRegion> estimate_slices(const SymbolExpr& e, SliceFamily which,
                                         const std::vector<double>& thetas, const SpectrumParams& params,
                                         std::size_t threads) {
  const QuadratureRule rule = build_quadrature(params.q_r, params.q_theta);
  std::vector<SliceRegion> out(thetas.size());
  std::vector<SymbolExpr> symbols;
  symbols.reserve(thetas.size());
  // Slices with identical symbol text share one estimate.
  std::map<std::string, std::size_t> first;
  std::vector<std::size_t> unique;
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    symbols.push_back(slice_symbol(e, which, thetas[j]));
    if (first.emplace(symbols.back().to_string(), j).second) unique.push_back(j);
  }
  parallel_for(unique.size(), threads, [&](std::size_t u) {
    const std::size_t j = unique[u];
    const ToeplitzMatrix1D section = build_toeplitz_1d(symbols[j], params.n, rule);
    out[j].region = spectrum_1d_estimate_detailed(symbols[j], section.entries, params).region;
  });
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    out[j].theta = thetas[j];
    const std::size_t src = first.at(symbols[j].to_string());
    if (src != j) out[j].region = out[src].region;
  }
  return out;
}

// Slice regions at the odd nodes of the 2M grid.
std::vector<SliceRegion> odd_refinement(const SymbolExpr& e, SliceFamily which, std::size_t m,
                                        const SpectrumParams& params, std::size_t threads) {
  const ThetaGrid fine(2 * m);
  std::vector<double> thetas;
  for (std::size_t j = 1; j < fine.size(); j += 2) thetas.push_back(fine.node(j));
  return estimate_slices(e, which, thetas, params, threads);
}

bool covered(const PointIndex& index, cplx p, double h) { return index.nearest_distance(p) <= h; }

// Outside the union the n2 value may fall below the n2 / 2 value by at most
// this fraction.
constexpr double kTrendSlack = 0.5;

}  // namespace

ThetaGrid::ThetaGrid(std::size_t m) : m_(m) {
  if (m < 4) throw std::invalid_argument("ThetaGrid: need at least 4 samples");
}

double ThetaGrid::node(std::size_t j) const noexcept {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m_);
}

const char* to_string(SliceFamily which) {
  return which == SliceFamily::Theta1 ? "theta1" : "theta2";
}

const char* to_string(ProbeStatus status) {
  return status == ProbeStatus::Consistent ? "consistent" : "inconclusive";
}

std::vector<SliceRegion> slice_spectra_family(const SymbolExpr& e, SliceFamily which, const ThetaGrid& grid,
                                              const SpectrumParams& params, std::size_t threads) {
  std::vector<double> thetas(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) thetas[j] = grid.node(j);
  return estimate_slices(e, which, thetas, params, threads);
}

GridSpec slice_grid(const SymbolExpr& e, const GridSpec& resolution, double padding) {
  constexpr std::size_t kCircle = 256;
  constexpr std::size_t kRings = 16;
  constexpr std::size_t kRingAngles = 64;
  std::vector<cplx> disc;
  disc.push_back({0.0, 0.0});
  for (std::size_t r = 1; r <= kRings; ++r) {
    for (std::size_t a = 0; a < kRingAngles; ++a) {
      disc.push_back(std::polar(static_cast<double>(r) / kRings,
                                2.0 * std::numbers::pi * static_cast<double>(a) / kRingAngles));
    }
  }
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  auto take = [&](cplx v) {
    xmin = std::min(xmin, v.real());
    xmax = std::max(xmax, v.real());
    ymin = std::min(ymin, v.imag());
    ymax = std::max(ymax, v.imag());
  };
  for (std::size_t t = 0; t < kCircle; ++t) {
    const cplx u = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(t) / kCircle);
    for (const cplx& zeta : disc) {
      take(e.eval(u, zeta));
      take(e.eval(zeta, u));
    }
  }
  const double pad = std::max(padding, 0.1 * std::max(xmax - xmin, ymax - ymin));
  GridSpec g = resolution;
  g.re_min = xmin - pad;
  g.re_max = xmax + pad;
  g.im_min = ymin - pad;
  g.im_max = ymax + pad;
  return g;
}

namespace {

struct BitsHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.first * 0x9E3779B97F4A7C15ull ^ k.second);
  }
};

}  // namespace

RegionApprox union_of_slices(const std::vector<SliceRegion>& theta1, const std::vector<SliceRegion>& theta2,
                             double h) {
  // Exact duplicates only: the slices share one grid, so this keeps the union
  // of a refined theta grid a true superset of the coarse one.
  std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, BitsHash> seen;
  RegionApprox out{{}, h, "slice-union"};
  for (const auto* family : {&theta1, &theta2}) {
    for (const auto& s : *family) {
      for (const auto& p : s.region.points) {
        const double re = p.real() == 0.0 ? 0.0 : p.real(), im = p.imag() == 0.0 ? 0.0 : p.imag();
        if (seen.emplace(std::bit_cast<std::uint64_t>(re), std::bit_cast<std::uint64_t>(im)).second)
          out.points.push_back({re, im});
      }
    }
  }
  return out;
}

EssentialSpectrumResult essential_spectrum_2d(const SymbolExpr& e, const EssentialParams& params) {
  if (params.slice.n == 0 || params.slice.n > kMaxSection1D) {
    throw std::invalid_argument(fmt::format("essential_spectrum_2d: n must lie in [1, {}]", kMaxSection1D));
  }
  SpectrumParams sp = params.slice;
  if (params.auto_grid) sp.grid = slice_grid(e, params.slice.grid, params.grid_padding);
  sp.grid.validate();
  const ThetaGrid coarse(params.m_theta);

  EssentialSpectrumResult result;
  result.params.symbol = e.to_string();
  result.params.requested = params;
  result.params.grid = sp.grid;
  result.params.m_theta = params.m_theta;

  result.slices_theta1 = slice_spectra_family(e, SliceFamily::Theta1, coarse, sp, params.threads);
  result.slices_theta2 = slice_spectra_family(e, SliceFamily::Theta2, coarse, sp, params.threads);
  const double h = sp.grid.spacing();
  result.union_region = union_of_slices(result.slices_theta1, result.slices_theta2, h);

  if (params.adaptive) {
    auto fine1 = interleave(result.slices_theta1,
                            odd_refinement(e, SliceFamily::Theta1, params.m_theta, sp, params.threads));
    auto fine2 = interleave(result.slices_theta2,
                            odd_refinement(e, SliceFamily::Theta2, params.m_theta, sp, params.threads));
    RegionApprox fine_union = union_of_slices(fine1, fine2, h);
    const double change = hausdorff_distance(result.union_region, fine_union);
    result.params.refinement_change = change;
    if (change > h) {
      result.slices_theta1 = std::move(fine1);
      result.slices_theta2 = std::move(fine2);
      result.union_region = std::move(fine_union);
      result.params.m_theta = 2 * params.m_theta;
      result.params.refined = true;
    }
  }
  return result;
}

std::pair<double, double> probe_sections(const SymbolExpr& e, std::size_t n, cplx lambda,
                                         const QuadratureRule& rule) {
  if (n < 2) throw std::invalid_argument("probe_sections: need at least 2 basis functions per factor");
  const auto half = build_toeplitz_2d(e, n / 2, rule);
  const auto full = build_toeplitz_2d(e, n, rule);
  return {smallest_singular_value(half.entries, lambda), smallest_singular_value(full.entries, lambda)};
}

VerifyReport verify_against_2d_sections(const SymbolExpr& e, const EssentialSpectrumResult& result,
                                        std::size_t n2, const std::vector<cplx>& probes,
                                        const QuadratureRule& rule) {
  const RegionApprox& region = result.union_region;
  if (region.empty()) throw std::invalid_argument("verify_against_2d_sections: empty union");
  const double h = region.h;
  const double eps = result.params.requested.slice.eps;
  const PointIndex index(region.points);

  VerifyReport report;
  report.n2 = n2;
  report.eps = eps;
  for (const cplx& lambda : probes) {
    const bool inside = covered(index, lambda, h);
    constexpr std::size_t kRing = 16;
    bool near_boundary = false;
    for (std::size_t t = 0; t < kRing && !near_boundary; ++t) {
      const cplx p = lambda + std::polar(2.0 * h, 2.0 * std::numbers::pi * static_cast<double>(t) / kRing);
      near_boundary = covered(index, p, h) != inside;
    }
    ProbeReport pr;
    pr.lambda = lambda;
    pr.inside = inside;
    std::tie(pr.sigma_half, pr.sigma_full) = probe_sections(e, n2, lambda, rule);
    // Near the boundary only a covered probe with a singular section is
    // decisive (e.g. an isolated point of the union); anything else is refused.
    if (near_boundary && !(inside && pr.sigma_full <= eps)) {
      throw ProbeTooClose(fmt::format("probe ({}, {}) lies within 2h = {:.3g} of the boundary of the union region",
                                      lambda.real(), lambda.imag(), 2.0 * h));
    }
    if (inside) {
      pr.status = pr.sigma_full <= eps ? ProbeStatus::Consistent : ProbeStatus::Inconclusive;
    } else {
      const bool bounded = pr.sigma_half >= 10.0 * eps && pr.sigma_full >= 10.0 * eps;
      const bool stable = pr.sigma_full >= (1.0 - kTrendSlack) * pr.sigma_half;
      pr.status = bounded && stable ? ProbeStatus::Consistent : ProbeStatus::Inconclusive;
    }
    report.probes.push_back(pr);
  }
  return report;
}

}  // namespace bergman
