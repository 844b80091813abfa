#include "bergman/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bergman {

namespace {

std::size_t hash_pair(const std::pair<long long, long long>& k) noexcept {
  const auto a = static_cast<std::size_t>(k.first);
  const auto b = static_cast<std::size_t>(k.second);
  return a * 0x9E3779B97F4A7C15ull ^ (b + 0x7F4A7C15ull + (a << 6) + (a >> 2));
}

}  // namespace

std::size_t PointIndex::KeyHash::operator()(const std::pair<long long, long long>& k) const noexcept {
  return hash_pair(k);
}

std::size_t RegionAccumulator::KeyHash::operator()(
    const std::pair<long long, long long>& k) const noexcept {
  return hash_pair(k);
}

PointIndex::PointIndex(std::span<const cplx> points, double cell)
    : points_(points.begin(), points.end()), cell_(cell) {
  if (points_.empty()) return;
  if (!(cell_ > 0.0)) {
    double xmin = points_[0].real(), xmax = xmin, ymin = points_[0].imag(), ymax = ymin;
    for (const auto& p : points_) {
      xmin = std::min(xmin, p.real());
      xmax = std::max(xmax, p.real());
      ymin = std::min(ymin, p.imag());
      ymax = std::max(ymax, p.imag());
    }
    const double extent = std::max(xmax - xmin, ymax - ymin);
    cell_ = extent > 0.0 ? extent / std::sqrt(static_cast<double>(points_.size())) : 1.0;
    cell_ = std::max(cell_, 1e-9);
  }
  bool first = true;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto k = key(points_[i]);
    buckets_[k].push_back(i);
    if (first) {
      min_x_ = max_x_ = k.first;
      min_y_ = max_y_ = k.second;
      first = false;
    } else {
      min_x_ = std::min(min_x_, k.first);
      max_x_ = std::max(max_x_, k.first);
      min_y_ = std::min(min_y_, k.second);
      max_y_ = std::max(max_y_, k.second);
    }
  }
}

std::pair<long long, long long> PointIndex::key(cplx p) const {
  return {static_cast<long long>(std::floor(p.real() / cell_)),
          static_cast<long long>(std::floor(p.imag() / cell_))};
}

double PointIndex::nearest_distance(cplx q) const {
  if (points_.empty()) return std::numeric_limits<double>::infinity();
  const auto [qx, qy] = key(q);
  // Rings beyond this radius cannot contain indexed cells.
  const long long max_ring =
      std::max({std::abs(qx - min_x_), std::abs(qx - max_x_), std::abs(qy - min_y_), std::abs(qy - max_y_)});
  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](long long x, long long y) {
    if (x < min_x_ || x > max_x_ || y < min_y_ || y > max_y_) return;
    const auto it = buckets_.find({x, y});
    if (it == buckets_.end()) return;
    for (const std::size_t i : it->second) best = std::min(best, std::abs(points_[i] - q));
  };
  // Start the ring search at the first ring that can intersect the bounding box.
  const long long gap_x = std::max({0LL, min_x_ - qx, qx - max_x_});
  const long long gap_y = std::max({0LL, min_y_ - qy, qy - max_y_});
  for (long long r = std::max(gap_x, gap_y); r <= max_ring; ++r) {
    // Every cell on ring r is at least (r - 1) * cell_ away from q.
    if (static_cast<double>(r - 1) * cell_ > best) break;
    if (r == 0) {
      visit(qx, qy);
      continue;
    }
    for (long long d = -r; d <= r; ++d) {
      visit(qx + d, qy - r);
      visit(qx + d, qy + r);
    }
    for (long long d = -r + 1; d <= r - 1; ++d) {
      visit(qx - r, qy + d);
      visit(qx + r, qy + d);
    }
  }
  return best;
}

double directed_hausdorff(std::span<const cplx> a, std::span<const cplx> b) {
  PointIndex index(b);
  double worst = 0.0;
  for (const auto& p : a) worst = std::max(worst, index.nearest_distance(p));
  return worst;
}

double hausdorff_distance(const RegionApprox& a, const RegionApprox& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff_distance: empty region");
  return std::max(directed_hausdorff(a.points, b.points), directed_hausdorff(b.points, a.points));
}

RegionAccumulator::RegionAccumulator(double h) : h_(h) {
  if (!(h > 0.0)) throw std::invalid_argument("RegionAccumulator: resolution must be positive");
}

void RegionAccumulator::add(cplx p) {
  const double cell = 0.5 * h_;
  const std::pair<long long, long long> k{static_cast<long long>(std::floor(p.real() / cell)),
                                          static_cast<long long>(std::floor(p.imag() / cell))};
  if (seen_.emplace(k, 1).second) points_.push_back(p);
}

void RegionAccumulator::add(const RegionApprox& r) {
  for (const auto& p : r.points) add(p);
}

RegionApprox RegionAccumulator::finish(std::string method) && {
  return RegionApprox{std::move(points_), h_, std::move(method)};
}

RegionApprox disc_mesh(cplx center, double radius, double h) {
  if (!(h > 0.0) || !(radius >= 0.0)) throw std::invalid_argument("disc_mesh: bad parameters");
  RegionApprox out;
  out.h = h;
  out.method = "disc-mesh";
  const long long k = static_cast<long long>(std::floor(radius / h));
  for (long long i = -k; i <= k; ++i) {
    for (long long j = -k; j <= k; ++j) {
      const cplx p{static_cast<double>(i) * h, static_cast<double>(j) * h};
      if (std::abs(p) <= radius) out.points.push_back(center + p);
    }
  }
  const auto m = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * radius / h)));
  for (std::size_t t = 0; t < m; ++t) {
    out.points.push_back(center + std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(m)));
  }
  return out;
}

RegionApprox image_of_disc(const SymbolExpr& e, double h) {
  RegionApprox mesh = disc_mesh({0.0, 0.0}, 1.0, h);
  for (auto& p : mesh.points) p = e.eval(p);
  mesh.method = "symbol-image";
  return mesh;
}

}  // namespace bergman
