#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bergman/region.hpp"
#include "bergman/spectra.hpp"
#include "bergman/symbol_expr.hpp"

namespace bergman {

/// theta_j = 2 pi j / M, j = 0..M-1.
class ThetaGrid {
 public:
  explicit ThetaGrid(std::size_t m);

  std::size_t size() const noexcept { return m_; }
  double node(std::size_t j) const noexcept;

 private:
  std::size_t m_;
};

enum class SliceFamily { Theta1, Theta2 };

const char* to_string(SliceFamily which);

struct SliceRegion {
  double theta = 0.0;
  RegionApprox region;
};

struct EssentialParams {
  SpectrumParams slice{};
  std::size_t m_theta = 64;
  /// One refinement round M -> 2M when the union moves by more than h.
  bool adaptive = true;
  /// Derive the shared slice grid from the symbol's range (keeping the
  /// resolution of slice.grid) instead of using slice.grid as given.
  bool auto_grid = true;
  double grid_padding = 0.5;
  std::size_t threads = 1;
};

/// Everything needed to reproduce a run.
struct EssentialRecord {
  std::string symbol;
  EssentialParams requested;
  GridSpec grid;            // grid actually used by every slice
  std::size_t m_theta = 0;  // samples per family in the returned result
  bool refined = false;
  double refinement_change = 0.0;  // Hausdorff(union_M, union_2M) when adaptive
};

struct EssentialSpectrumResult {
  RegionApprox union_region;
  std::vector<SliceRegion> slices_theta1;
  std::vector<SliceRegion> slices_theta2;
  EssentialRecord params;
};

/// Spectrum estimates of the slice symbols f(e^{i theta}, .) or
/// f(., e^{i theta}) for every theta in the grid, sharing one complex grid.
/// One-variable input is treated as f(z, w) = g(z).
std::vector<SliceRegion> slice_spectra_family(const SymbolExpr& e, SliceFamily which,
                                              const ThetaGrid& grid, const SpectrumParams& params,
                                              std::size_t threads = 1);

/// Padded bounding box of the slice symbols' values over the closed disc,
/// at the resolution of `resolution`.
GridSpec slice_grid(const SymbolExpr& e, const GridSpec& resolution, double padding);

/// Essential spectrum of T_f on the bi-disc as the union of both slice
/// families' spectra.
EssentialSpectrumResult essential_spectrum_2d(const SymbolExpr& e, const EssentialParams& params);

/// Point-cloud union of all slice regions, deduplicated at resolution h.
RegionApprox union_of_slices(const std::vector<SliceRegion>& theta1,
                             const std::vector<SliceRegion>& theta2, double h);

enum class ProbeStatus { Consistent, Inconclusive };

const char* to_string(ProbeStatus status);

struct ProbeReport {
  cplx lambda{};
  bool inside = false;        // lambda covered by the union region
  double sigma_half = 0.0;    // sigma_min at n2 / 2 per factor
  double sigma_full = 0.0;    // sigma_min at n2 per factor
  ProbeStatus status = ProbeStatus::Inconclusive;
};

struct VerifyReport {
  std::size_t n2 = 0;
  double eps = 0.0;
  std::vector<ProbeReport> probes;
};

/// sigma_min(A - lambda I) of the 2D sections at n / 2 and n per factor.
std::pair<double, double> probe_sections(const SymbolExpr& e, std::size_t n, cplx lambda,
                                         const QuadratureRule& rule);

/// Fredholm sanity probe on growing 2D sections. Outside the union the
/// smallest singular value should stay bounded away from zero; inside it
/// should be at most eps. Throws ProbeTooClose when a probe lies within 2h of
/// the union's boundary. Never alters `result`.
VerifyReport verify_against_2d_sections(const SymbolExpr& e, const EssentialSpectrumResult& result,
                                        std::size_t n2, const std::vector<cplx>& probes,
                                        const QuadratureRule& rule);

}  // namespace bergman
