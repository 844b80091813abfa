#include "bergman/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

namespace {

enum class Triangle { None, Lower, Upper };

Triangle triangular_shape(const Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  bool upper = true;
  bool lower = true;
  for (Eigen::Index k = 0; k < n && (upper || lower); ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (a(j, k) == cplx{}) continue;
      if (j > k) upper = false;
      if (j < k) lower = false;
    }
  }
  if (upper) return Triangle::Upper;
  if (lower) return Triangle::Lower;
  return Triangle::None;
}

double spectral_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

// Distance from p to the segment [a, b].
double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

double polygon_distance(const std::vector<cplx>& curve, cplx p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < curve.size(); ++k) {
    best = std::min(best, segment_distance(p, curve[k], curve[(k + 1) % curve.size()]));
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Eigenvalues and direct singular values.

SpectrumApprox eigenvalues(const Eigen::MatrixXcd& a, std::string source) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigenvalues: matrix is not square");
  if (!a.allFinite()) throw std::invalid_argument("eigenvalues: matrix has non-finite entries");
  SpectrumApprox out;
  out.source = std::move(source);
  out.tol = 1e-10;
  const Eigen::Index n = a.rows();
  std::vector<std::pair<cplx, double>> pairs;
  pairs.reserve(static_cast<std::size_t>(n));

  if (triangular_shape(a) != Triangle::None) {
    // Exact: the diagonal of a triangular matrix is its spectrum.
    for (Eigen::Index i = 0; i < n; ++i) pairs.emplace_back(a(i, i), 0.0);
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver;
    solver.setMaxIterations(30 * static_cast<Eigen::Index>(std::max<Eigen::Index>(n, 1)));
    solver.compute(a, true);
    if (solver.info() != Eigen::Success) {
      const auto iters = static_cast<std::size_t>(solver.getMaxIterations());
      throw NumericalError(
          fmt::format("eigenvalues: Schur reduction did not converge within {} iterations", iters),
          iters);
    }
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXcd v = vecs.col(i);
      const double nv = v.norm();
      const double res = nv > 0.0 ? (a * v - vals(i) * v).norm() / nv : 0.0;
      pairs.emplace_back(vals(i), res);
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
    if (x.first.real() != y.first.real()) return x.first.real() < y.first.real();
    return x.first.imag() < y.first.imag();
  });
  for (const auto& [lambda, res] : pairs) {
    out.points.push_back(lambda);
    out.residuals.push_back(res);
  }
  return out;
}

SpectrumApprox eigenvalues(const ToeplitzMatrix1D& m) {
  return eigenvalues(m.entries, fmt::format("1d:{}:n={}", m.meta.symbol, m.meta.n));
}

SpectrumApprox eigenvalues(const ToeplitzMatrix2D& m) {
  return eigenvalues(m.entries, fmt::format("2d:{}:n={}", m.meta.symbol, m.meta.n));
}

double smallest_singular_value(const Eigen::MatrixXcd& a, cplx lambda) {
  if (a.rows() != a.cols()) throw std::invalid_argument("smallest_singular_value: matrix is not square");
  if (a.size() == 0) return 0.0;
  Eigen::MatrixXcd shifted = a;
  shifted.diagonal().array() -= lambda;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(shifted);
  const auto& s = svd.singularValues();
  return std::max(0.0, s(s.size() - 1));
}

// ---------------------------------------------------------------------------
// Grid.

void GridSpec::validate() const {
  if (n_re < 2 || n_im < 2) throw std::invalid_argument("grid: resolution must be at least 2 x 2");
  if (!(re_max > re_min) || !(im_max > im_min) || !std::isfinite(re_min) || !std::isfinite(re_max) ||
      !std::isfinite(im_min) || !std::isfinite(im_max)) {
    throw std::invalid_argument("grid: degenerate rectangle");
  }
}

double GridSpec::dx() const noexcept { return (re_max - re_min) / static_cast<double>(n_re - 1); }
double GridSpec::dy() const noexcept { return (im_max - im_min) / static_cast<double>(n_im - 1); }
double GridSpec::spacing() const noexcept { return std::max(dx(), dy()); }

cplx GridSpec::node(std::size_t p, std::size_t q) const noexcept {
  return {re_min + static_cast<double>(q) * dx(), im_min + static_cast<double>(p) * dy()};
}

// ---------------------------------------------------------------------------
// sigma_min over many shifts.

ShiftedSigmaMin::ShiftedSigmaMin(const Eigen::MatrixXcd& a) : n_(static_cast<std::size_t>(a.rows())) {
  if (a.rows() != a.cols()) throw std::invalid_argument("ShiftedSigmaMin: matrix is not square");
  if (!a.allFinite()) throw std::invalid_argument("ShiftedSigmaMin: matrix has non-finite entries");
  Eigen::MatrixXcd t;
  switch (triangular_shape(a)) {
    case Triangle::Upper:
      t = a;
      break;
    case Triangle::Lower:
      // Singular values are transpose invariant.
      t = a.transpose();
      break;
    case Triangle::None: {
      Eigen::ComplexSchur<Eigen::MatrixXcd> schur;
      schur.setMaxIterations(30 * static_cast<Eigen::Index>(std::max<std::size_t>(n_, 1)));
      schur.compute(a, false);
      if (schur.info() != Eigen::Success) {
        const auto iters = static_cast<std::size_t>(schur.getMaxIterations());
        throw NumericalError(fmt::format("Schur reduction did not converge within {} iterations", iters),
                             iters);
      }
      t = schur.matrixT().triangularView<Eigen::Upper>();
      break;
    }
  }

  t_re_.resize(n_ * n_);
  t_im_.resize(n_ * n_);
  diag_.resize(n_);
  double off = 0.0;
  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t j = 0; j < n_; ++j) {
      const cplx v = j <= k ? t(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) : cplx{};
      t_re_[k * n_ + j] = v.real();
      t_im_[k * n_ + j] = v.imag();
      if (j < k) off += std::norm(v);
    }
    diag_[k] = t(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  }
  // With a negligible strictly upper part the distance to the diagonal is
  // sigma_min up to that part's norm.
  normal_ = std::sqrt(off) <= 1e-14 * std::max(a.norm(), std::numeric_limits<double>::min());

  if (n_ > 0) {
    center_ = a.trace() / static_cast<double>(n_);
    Eigen::MatrixXcd centered = a;
    centered.diagonal().array() -= center_;
    radius_ = spectral_norm(centered);
  }

  // Fixed pseudo-random start vector so results are reproducible.
  start_re_.resize(n_);
  start_im_.resize(n_);
  std::uint64_t state = 0x2545F4914F6CDD1Dull;
  auto next = [&state] {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<double>(state >> 11) / static_cast<double>(1ull << 53) - 0.5;
  };
  double norm2 = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    start_re_[i] = next();
    start_im_[i] = next();
    norm2 += start_re_[i] * start_re_[i] + start_im_[i] * start_im_[i];
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t i = 0; i < n_; ++i) {
    start_re_[i] *= inv;
    start_im_[i] *= inv;
  }
}

double ShiftedSigmaMin::lower_bound(cplx lambda) const noexcept {
  return std::abs(lambda - center_) - radius_;
}

// Solves (T - lambda) x = b in place, column-oriented back substitution.
void ShiftedSigmaMin::solve_upper(cplx lambda, std::vector<double>& re, std::vector<double>& im) const {
  const double lr = lambda.real(), li = lambda.imag();
  for (std::size_t jj = n_; jj-- > 0;) {
    const double* cr = &t_re_[jj * n_];
    const double* ci = &t_im_[jj * n_];
    const double dr = cr[jj] - lr;
    const double di = ci[jj] - li;
    const double den = dr * dr + di * di;
    const double xr = (re[jj] * dr + im[jj] * di) / den;
    const double xi = (im[jj] * dr - re[jj] * di) / den;
    re[jj] = xr;
    im[jj] = xi;
    for (std::size_t i = 0; i < jj; ++i) {
      re[i] -= cr[i] * xr - ci[i] * xi;
      im[i] -= cr[i] * xi + ci[i] * xr;
    }
  }
}

// Solves (T - lambda)^* x = b in place, forward substitution.
void ShiftedSigmaMin::solve_upper_adjoint(cplx lambda, std::vector<double>& re,
                                          std::vector<double>& im) const {
  const double lr = lambda.real(), li = lambda.imag();
  for (std::size_t i = 0; i < n_; ++i) {
    const double* cr = &t_re_[i * n_];
    const double* ci = &t_im_[i * n_];
    double sr = 0.0, si = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      // conj(t_ji) * x_j
      sr += cr[j] * re[j] + ci[j] * im[j];
      si += cr[j] * im[j] - ci[j] * re[j];
    }
    const double br = re[i] - sr;
    const double bi = im[i] - si;
    // divide by conj(t_ii - lambda)
    const double dr = cr[i] - lr;
    const double di = -(ci[i] - li);
    const double den = dr * dr + di * di;
    re[i] = (br * dr + bi * di) / den;
    im[i] = (bi * dr - br * di) / den;
  }
}

double ShiftedSigmaMin::lanczos(cplx lambda, double threshold) const {
  constexpr double kOverflowGuard = 1e150;
  constexpr double kRelTol = 1e-10;
  const std::size_t max_iter = std::min<std::size_t>(n_, 80);

  std::vector<std::vector<double>> basis_re;
  std::vector<std::vector<double>> basis_im;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> q_re = start_re_;
  std::vector<double> q_im = start_im_;
  std::vector<double> y_re(n_), y_im(n_);
  double theta_prev = 0.0;
  double upper = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < max_iter; ++k) {
    y_re = q_re;
    y_im = q_im;
    solve_upper(lambda, y_re, y_im);
    double ny = 0.0;
    for (std::size_t i = 0; i < n_; ++i) ny += y_re[i] * y_re[i] + y_im[i] * y_im[i];
    ny = std::sqrt(ny);
    // ||R^{-1} q|| with ||q|| = 1 bounds ||R^{-1}|| from below.
    if (!std::isfinite(ny)) return 0.0;
    upper = std::min(upper, 1.0 / ny);
    if (ny > kOverflowGuard) return upper;
    solve_upper_adjoint(lambda, y_re, y_im);
    if (!std::all_of(y_re.begin(), y_re.end(), [](double v) { return std::isfinite(v); })) return upper;

    double a = 0.0;
    for (std::size_t i = 0; i < n_; ++i) a += q_re[i] * y_re[i] + q_im[i] * y_im[i];
    alpha.push_back(a);
    basis_re.push_back(q_re);
    basis_im.push_back(q_im);
    // Full reorthogonalisation against the stored basis.
    for (std::size_t b = 0; b < basis_re.size(); ++b) {
      double cr = 0.0, ci = 0.0;
      const auto& br = basis_re[b];
      const auto& bi = basis_im[b];
      for (std::size_t i = 0; i < n_; ++i) {
        cr += br[i] * y_re[i] + bi[i] * y_im[i];
        ci += br[i] * y_im[i] - bi[i] * y_re[i];
      }
      for (std::size_t i = 0; i < n_; ++i) {
        y_re[i] -= cr * br[i] - ci * bi[i];
        y_im[i] -= cr * bi[i] + ci * br[i];
      }
    }
    double nb = 0.0;
    for (std::size_t i = 0; i < n_; ++i) nb += y_re[i] * y_re[i] + y_im[i] * y_im[i];
    nb = std::sqrt(nb);

    double theta = a;
    if (alpha.size() > 1) {
      Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
      Eigen::VectorXd e = Eigen::Map<Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
      theta = tri.eigenvalues().maxCoeff();
    }
    if (theta > 0.0) upper = std::min(upper, 1.0 / std::sqrt(theta));
    if (upper <= threshold) return upper;
    if (k > 0 && std::abs(theta - theta_prev) <= kRelTol * theta) return upper;
    if (nb <= 1e-13 * theta) return upper;
    theta_prev = theta;
    beta.push_back(nb);
    for (std::size_t i = 0; i < n_; ++i) {
      q_re[i] = y_re[i] / nb;
      q_im[i] = y_im[i] / nb;
    }
  }
  return upper;
}

double ShiftedSigmaMin::value(cplx lambda) const {
  if (n_ == 0) return 0.0;
  if (normal_) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& d : diag_) best = std::min(best, std::abs(d - lambda));
    return best;
  }
  return lanczos(lambda, 0.0);
}

bool ShiftedSigmaMin::at_most(cplx lambda, double eps) const {
  if (n_ == 0) return true;
  if (lower_bound(lambda) > eps) return false;
  if (normal_) return value(lambda) <= eps;
  return lanczos(lambda, eps) <= eps;
}

std::vector<std::size_t> PseudospectrumGrid::indicator() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= epsilon) out.push_back(i);
  }
  return out;
}

PseudospectrumGrid pseudospectrum(const Eigen::MatrixXcd& a, const GridSpec& grid, double eps,
                                  std::size_t threads) {
  if (!(eps > 0.0)) throw std::invalid_argument("pseudospectrum: eps must be positive");
  grid.validate();
  const ShiftedSigmaMin sigma(a);
  PseudospectrumGrid out{grid, std::vector<double>(grid.size()), eps};
  parallel_for(grid.n_im, threads, [&](std::size_t p) {
    for (std::size_t q = 0; q < grid.n_re; ++q) out.values[p * grid.n_re + q] = sigma.value(grid.node(p, q));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Boundary curve, winding numbers, estimates.

RegionApprox essential_spectrum_1d(const SymbolExpr& e, std::size_t m_theta) {
  if (e.is_two_variable()) throw std::invalid_argument("essential_spectrum_1d: symbol is two-variable");
  if (m_theta < 8) throw std::invalid_argument("essential_spectrum_1d: need at least 8 samples");
  RegionApprox out;
  out.method = "boundary-symbol";
  out.points.reserve(m_theta);
  for (std::size_t m = 0; m < m_theta; ++m) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(m_theta);
    out.points.push_back(e.eval(std::polar(1.0, theta)));
  }
  double gap = 0.0;
  for (std::size_t m = 0; m < m_theta; ++m) {
    gap = std::max(gap, std::abs(out.points[(m + 1) % m_theta] - out.points[m]));
  }
  out.h = std::max(gap, 1e-12);
  return out;
}

int winding_number(const SymbolExpr& e, cplx lambda, std::size_t m_theta) {
  const RegionApprox curve = essential_spectrum_1d(e, m_theta);
  const double dist = polygon_distance(curve.points, lambda);
  if (dist <= curve.h) {
    throw IllConditionedWinding(fmt::format(
        "ill-conditioned winding: lambda = ({}, {}) is {:.3g} from the sampled curve (clearance {:.3g})",
        lambda.real(), lambda.imag(), dist, curve.h));
  }
  double total = 0.0;
  const std::size_t m = curve.points.size();
  for (std::size_t k = 0; k < m; ++k) {
    const cplx a = curve.points[k] - lambda;
    const cplx b = curve.points[(k + 1) % m] - lambda;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

std::vector<std::optional<int>> winding_grid(const std::vector<cplx>& curve, double clearance,
                                             const GridSpec& grid) {
  grid.validate();
  std::vector<std::optional<int>> out(grid.size());
  const std::size_t m = curve.size();
  if (m == 0) {
    std::fill(out.begin(), out.end(), 0);
    return out;
  }
  // Crossing count along +x rays, one scanline per grid row.
  std::vector<std::pair<double, int>> crossings;
  for (std::size_t p = 0; p < grid.n_im; ++p) {
    const double y = grid.node(p, 0).imag();
    crossings.clear();
    int total = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const cplx a = curve[k];
      const cplx b = curve[(k + 1) % m];
      int sign = 0;
      if (a.imag() <= y && y < b.imag()) sign = 1;
      else if (b.imag() <= y && y < a.imag()) sign = -1;
      if (sign == 0) continue;
      const double x = a.real() + (y - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      crossings.emplace_back(x, sign);
      total += sign;
    }
    std::sort(crossings.begin(), crossings.end());
    std::size_t c = 0;
    int left = 0;
    for (std::size_t q = 0; q < grid.n_re; ++q) {
      const double x0 = grid.node(p, q).real();
      while (c < crossings.size() && crossings[c].first <= x0) left += crossings[c++].second;
      out[p * grid.n_re + q] = total - left;
    }
  }
  // Refuse nodes within the clearance of any segment.
  const double dx = grid.dx(), dy = grid.dy();
  for (std::size_t k = 0; k < m; ++k) {
    const cplx a = curve[k];
    const cplx b = curve[(k + 1) % m];
    const double x0 = std::min(a.real(), b.real()) - clearance;
    const double x1 = std::max(a.real(), b.real()) + clearance;
    const double y0 = std::min(a.imag(), b.imag()) - clearance;
    const double y1 = std::max(a.imag(), b.imag()) + clearance;
    const auto q0 = static_cast<long long>(std::ceil((x0 - grid.re_min) / dx));
    const auto q1 = static_cast<long long>(std::floor((x1 - grid.re_min) / dx));
    const auto p0 = static_cast<long long>(std::ceil((y0 - grid.im_min) / dy));
    const auto p1 = static_cast<long long>(std::floor((y1 - grid.im_min) / dy));
    for (long long p = std::max(0LL, p0); p <= std::min<long long>(p1, static_cast<long long>(grid.n_im) - 1); ++p) {
      for (long long q = std::max(0LL, q0); q <= std::min<long long>(q1, static_cast<long long>(grid.n_re) - 1); ++q) {
        const auto pu = static_cast<std::size_t>(p), qu = static_cast<std::size_t>(q);
        if (segment_distance(grid.node(pu, qu), a, b) <= clearance) out[pu * grid.n_re + qu] = std::nullopt;
      }
    }
  }
  return out;
}

SpectrumEstimate spectrum_1d_estimate_detailed(const SymbolExpr& e, const Eigen::MatrixXcd& section,
                                               const SpectrumParams& params) {
  if (e.is_two_variable()) throw std::invalid_argument("spectrum_1d_estimate: symbol is two-variable");
  if (!(params.eps > 0.0)) throw std::invalid_argument("spectrum_1d_estimate: eps must be positive");
  const GridSpec& grid = params.grid;
  grid.validate();

  SpectrumEstimate out;
  const RegionApprox curve = essential_spectrum_1d(e, params.m_boundary);
  const auto winding = winding_grid(curve.points, curve.h, grid);
  const ShiftedSigmaMin sigma(section);

  out.region.h = grid.spacing();
  out.region.method = "pseudospectrum+boundary+winding";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& w = winding[i];
    if (!w) ++out.refused_nodes;
    if (w && *w != 0) {
      ++out.winding_nodes;
      out.region.points.push_back(grid.node(i));
      continue;
    }
    // Nodes already admitted by the winding test need no sigma_min.
    if (sigma.at_most(grid.node(i), params.eps)) {
      ++out.pseudo_nodes;
      out.region.points.push_back(grid.node(i));
    }
  }
  out.boundary_points = curve.points.size();
  out.region.points.insert(out.region.points.end(), curve.points.begin(), curve.points.end());
  return out;
}

SpectrumEstimate spectrum_1d_estimate_detailed(const SymbolExpr& e, const SpectrumParams& params) {
  const QuadratureRule rule = build_quadrature(params.q_r, params.q_theta);
  const ToeplitzMatrix1D m = build_toeplitz_1d(e, params.n, rule);
  return spectrum_1d_estimate_detailed(e, m.entries, params);
}

RegionApprox spectrum_1d_estimate(const SymbolExpr& e, const SpectrumParams& params) {
  return spectrum_1d_estimate_detailed(e, params).region;
}

}  // namespace bergman
