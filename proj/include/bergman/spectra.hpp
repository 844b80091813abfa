#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bergman/region.hpp"
#include "bergman/symbol_expr.hpp"
#include "bergman/toeplitz.hpp"

namespace bergman {

struct SpectrumApprox {
  std::vector<cplx> points;
  /// ||A v - lambda v|| / ||v|| for the reported eigenpair.
  std::vector<double> residuals;
  /// Declared bound: residual <= tol * ||A||_2.
  double tol = 0.0;
  std::string source;
};

/// All eigenvalues with multiplicity, sorted by (real, imag). Triangular
/// input is read off the diagonal exactly; anything else goes through a
/// complex Schur reduction. Throws NumericalError on non-convergence.
SpectrumApprox eigenvalues(const Eigen::MatrixXcd& a, std::string source = {});
SpectrumApprox eigenvalues(const ToeplitzMatrix1D& m);
SpectrumApprox eigenvalues(const ToeplitzMatrix2D& m);

/// sigma_min(A - lambda I) from a dense SVD.
double smallest_singular_value(const Eigen::MatrixXcd& a, cplx lambda);

/// Rectangle [re_min, re_max] x [im_min, im_max] sampled at n_re x n_im nodes,
/// endpoints included. Node (row p, column q) sits at
/// re_min + q * dx + i (im_min + p * dy); storage is row-major over p.
struct GridSpec {
  double re_min = -1.5;
  double re_max = 1.5;
  double im_min = -1.5;
  double im_max = 1.5;
  std::size_t n_re = 201;
  std::size_t n_im = 201;

  void validate() const;
  double dx() const noexcept;
  double dy() const noexcept;
  double spacing() const noexcept;
  std::size_t size() const noexcept { return n_re * n_im; }
  cplx node(std::size_t p, std::size_t q) const noexcept;
  cplx node(std::size_t flat) const noexcept { return node(flat / n_re, flat % n_re); }
};

/// Repeated evaluation of sigma_min(A - lambda I) over many shifts.
///
/// A is reduced once to upper-triangular form (Schur, or a transpose when A
/// is already triangular). Each shift then costs a handful of triangular
/// solves: inverse Lanczos on (T - lambda)^{-*} (T - lambda)^{-1}.
class ShiftedSigmaMin {
 public:
  explicit ShiftedSigmaMin(const Eigen::MatrixXcd& a);

  /// sigma_min(A - lambda I). Values below ~1e-150 are reported as the upper
  /// bound reached when the iteration overflows.
  double value(cplx lambda) const;

  /// sigma_min(A - lambda I) <= eps, deciding early from cheap bounds.
  bool at_most(cplx lambda, double eps) const;

  /// Lower bound |lambda - c| - ||A - c I||_2 with c the diagonal mean.
  double lower_bound(cplx lambda) const noexcept;

  bool normal() const noexcept { return normal_; }

 private:
  double lanczos(cplx lambda, double threshold) const;
  void solve_upper(cplx lambda, std::vector<double>& re, std::vector<double>& im) const;
  void solve_upper_adjoint(cplx lambda, std::vector<double>& re, std::vector<double>& im) const;

  std::size_t n_ = 0;
  std::vector<double> t_re_;  // column-major upper triangle
  std::vector<double> t_im_;
  std::vector<cplx> diag_;
  bool normal_ = false;
  cplx center_{};
  double radius_ = 0.0;
  std::vector<double> start_re_;
  std::vector<double> start_im_;
};

struct PseudospectrumGrid {
  GridSpec grid;
  std::vector<double> values;  // sigma_min at each node, row-major
  double epsilon = 0.0;

  /// Flat node indices with value <= epsilon.
  std::vector<std::size_t> indicator() const;
  bool inside(std::size_t flat) const { return values[flat] <= epsilon; }
};

/// Throws std::invalid_argument for eps <= 0, resolution below 2 x 2 or a
/// degenerate rectangle.
PseudospectrumGrid pseudospectrum(const Eigen::MatrixXcd& a, const GridSpec& grid, double eps,
                                  std::size_t threads = 1);

/// Samples phi on the unit circle at M equispaced angles; h is the largest
/// gap between consecutive samples (floored at 1e-12 for constant curves).
RegionApprox essential_spectrum_1d(const SymbolExpr& e, std::size_t m_theta);

/// Winding number of phi(e^{i theta}) - lambda over the sampled curve. Throws
/// IllConditionedWinding when lambda lies within the curve's sample gap of
/// the polygon through the samples.
int winding_number(const SymbolExpr& e, cplx lambda, std::size_t m_theta);

/// Per-node winding numbers of a closed polygon around grid nodes. Nodes
/// closer than `clearance` to the polygon are reported as nullopt.
std::vector<std::optional<int>> winding_grid(const std::vector<cplx>& curve, double clearance,
                                             const GridSpec& grid);

struct SpectrumParams {
  std::size_t n = 120;
  double eps = 1e-3;
  GridSpec grid{};
  std::size_t m_boundary = 512;
  std::size_t q_r = 64;
  std::size_t q_theta = 256;
};

struct SpectrumEstimate {
  RegionApprox region;
  std::size_t pseudo_nodes = 0;     // nodes admitted by sigma_min <= eps
  std::size_t winding_nodes = 0;    // nodes admitted by nonzero winding
  std::size_t refused_nodes = 0;    // nodes where the winding was ill-posed
  std::size_t boundary_points = 0;  // samples of phi on the circle
};

/// Union of the eps-pseudospectrum nodes of the N-section, the boundary
/// curve phi(T) and the grid nodes with nonzero well-posed winding number.
SpectrumEstimate spectrum_1d_estimate_detailed(const SymbolExpr& e, const SpectrumParams& params);

/// Same, using an already assembled section.
SpectrumEstimate spectrum_1d_estimate_detailed(const SymbolExpr& e, const Eigen::MatrixXcd& section,
                                               const SpectrumParams& params);

RegionApprox spectrum_1d_estimate(const SymbolExpr& e, const SpectrumParams& params);

}  // namespace bergman
