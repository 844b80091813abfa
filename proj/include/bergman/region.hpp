#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bergman/symbol_expr.hpp"

namespace bergman {

/// Finite point cloud standing in for a compact subset of the plane, with a
/// covering resolution h (> 0).
struct RegionApprox {
  std::vector<cplx> points;
  double h = 0.0;
  std::string method;

  bool empty() const noexcept { return points.empty(); }
};

/// Bucketed nearest-neighbour lookup over a fixed point set.
class PointIndex {
 public:
  explicit PointIndex(std::span<const cplx> points, double cell = 0.0);

  /// Distance from q to the nearest indexed point (+inf if the set is empty).
  double nearest_distance(cplx q) const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<long long, long long>& k) const noexcept;
  };
  std::pair<long long, long long> key(cplx p) const;

  std::vector<cplx> points_;
  double cell_;
  long long min_x_ = 0, max_x_ = 0, min_y_ = 0, max_y_ = 0;
  std::unordered_map<std::pair<long long, long long>, std::vector<std::size_t>, KeyHash> buckets_;
};

/// sup over a of the distance to b.
double directed_hausdorff(std::span<const cplx> a, std::span<const cplx> b);

/// Symmetric Hausdorff distance. Throws std::invalid_argument if either
/// region is empty.
double hausdorff_distance(const RegionApprox& a, const RegionApprox& b);

/// Appends src to dst, dropping points that fall in an already occupied cell
/// of side h / 2. Keeps first occurrences, so the result is order-stable.
class RegionAccumulator {
 public:
  explicit RegionAccumulator(double h);
  void add(cplx p);
  void add(const RegionApprox& r);
  RegionApprox finish(std::string method) &&;

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<long long, long long>& k) const noexcept;
  };
  double h_;
  std::vector<cplx> points_;
  std::unordered_map<std::pair<long long, long long>, char, KeyHash> seen_;
};

/// Closed disc reference mesh: square lattice of spacing h clipped to the
/// disc, plus boundary samples spaced at most h apart.
RegionApprox disc_mesh(cplx center, double radius, double h);

/// Image of the closed unit disc under a one-variable symbol, sampled on
/// disc_mesh(0, 1, h).
RegionApprox image_of_disc(const SymbolExpr& e, double h);

}  // namespace bergman
