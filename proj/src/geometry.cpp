#include "cpw/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpw {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Smallest power of two >= s (s > 0), as an exact double.
double pow2_at_least(double s) {
  int e = std::ilogb(s);
  double c = std::ldexp(1.0, e);
  if (c < s) c *= 2.0;
  return c;
}

}  // namespace

Cube::Cube(std::vector<double> lo, double s) : lower(std::move(lo)), side(s) {
  if (lower.empty()) throw std::invalid_argument("Cube: dim must be positive");
  if (!(side > 0) || !std::isfinite(side)) throw std::invalid_argument("Cube: side must be finite and > 0");
  if (!all_finite(lower)) throw std::invalid_argument("Cube: non-finite coordinate");
}

Cube Cube::interval(double a, double b) {
  if (!(b > a)) throw std::invalid_argument("Cube::interval: need b > a");
  return Cube({a}, b - a);
}

double Cube::volume() const { return std::pow(side, dim()); }

double Cube::diameter() const { return side * std::sqrt(static_cast<double>(dim())); }

std::vector<double> Cube::center() const {
  std::vector<double> c(lower);
  for (double& x : c) x += side / 2.0;
  return c;
}

bool Cube::contains(const std::vector<double>& x) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lower[i] || x[i] >= lower[i] + side) return false;
  return true;
}

bool Cube::contains_cube(const Cube& q) const {
  for (int i = 0; i < dim(); ++i)
    if (q.lower[i] < lower[i] || q.lower[i] + q.side > lower[i] + side) return false;
  return true;
}

double Cube::overlap(const Cube& q) const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) {
    double lo = std::max(lower[i], q.lower[i]);
    double hi = std::min(lower[i] + side, q.lower[i] + q.side);
    if (hi <= lo) return 0.0;
    v *= hi - lo;
  }
  return v;
}

double Cube::distance(const Cube& q) const {
  double s2 = 0.0;
  for (int i = 0; i < dim(); ++i) {
    double gap = std::max({0.0, q.lower[i] - (lower[i] + side), lower[i] - (q.lower[i] + q.side)});
    s2 += gap * gap;
  }
  return std::sqrt(s2);
}

Cube dilate(const Cube& q, double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("dilate: gamma must be > 0");
  std::vector<double> lo(q.lower);
  double shift = q.side * (1.0 - gamma) / 2.0;
  for (double& x : lo) x += shift;
  return Cube(std::move(lo), q.side * gamma);
}

double DyadicCube::side() const { return std::ldexp(1.0, -generation); }

Cube DyadicCube::cube() const {
  double s = side();
  std::vector<double> lo(index.size());
  for (std::size_t i = 0; i < index.size(); ++i)
    lo[i] = std::ldexp(static_cast<double>(index[i]), -generation);
  return Cube(std::move(lo), s);
}

DyadicCube DyadicCube::parent() const {
  std::vector<std::int64_t> z(index);
  for (auto& v : z) v >>= 1;  // floor division by 2
  return DyadicCube(generation - 1, std::move(z));
}

std::vector<DyadicCube> DyadicCube::children() const {
  int n = dim();
  std::vector<DyadicCube> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::int64_t> z(index.size());
    for (int i = 0; i < n; ++i) z[i] = 2 * index[i] + ((mask >> i) & 1);
    out.emplace_back(generation + 1, std::move(z));
  }
  return out;
}

bool DyadicCube::contains(const DyadicCube& q) const {
  if (q.generation < generation || q.dim() != dim()) return false;
  int shift = q.generation - generation;
  for (int i = 0; i < dim(); ++i)
    if ((q.index[i] >> shift) != index[i]) return false;
  return true;
}

DyadicCube dyadic_cell_at(const std::vector<double>& x, int generation) {
  std::vector<std::int64_t> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    z[i] = static_cast<std::int64_t>(std::floor(std::ldexp(x[i], generation)));
  return DyadicCube(generation, std::move(z));
}

std::vector<DyadicCube> dyadic_cover(const Cube& q) {
  double c = pow2_at_least(q.side);  // cell side in [l(Q), 2 l(Q))
  int g = -std::ilogb(c);
  int n = q.dim();
  std::vector<std::pair<std::int64_t, std::int64_t>> range(n);
  for (int i = 0; i < n; ++i) {
    auto i0 = static_cast<std::int64_t>(std::floor(q.lower[i] / c));
    auto i1 = static_cast<std::int64_t>(std::floor(q.upper(i) / c));
    if (static_cast<double>(i1) * c >= q.upper(i)) i1 -= 1;  // half-open upper edge
    range[i] = {i0, std::max(i0, i1)};
  }
  std::vector<DyadicCube> out;
  std::vector<std::int64_t> z(n);
  // cartesian product; at most 2 cells per axis
  std::vector<std::int64_t> cur(n);
  for (int i = 0; i < n; ++i) cur[i] = range[i].first;
  while (true) {
    out.emplace_back(g, cur);
    int axis = 0;
    while (axis < n) {
      if (cur[axis] < range[axis].second) {
        ++cur[axis];
        for (int j = 0; j < axis; ++j) cur[j] = range[j].first;
        break;
      }
      ++axis;
    }
    if (axis == n) break;
  }
  return out;
}

Box::Box(std::vector<double> l, std::vector<double> h) : lo(std::move(l)), hi(std::move(h)) {
  if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("Box: bad extents");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(hi[i] > lo[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw std::invalid_argument("Box: need finite hi > lo per axis");
}

Box Box::of(const Cube& q) {
  std::vector<double> h(q.lower);
  for (double& x : h) x += q.side;
  return Box(q.lower, std::move(h));
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

double Box::overlap_volume(const Box& o) const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    double l = std::max(lo[i], o.lo[i]);
    double h = std::min(hi[i], o.hi[i]);
    if (h <= l) return 0.0;
    v *= h - l;
  }
  return v;
}

double Box::distance(const Box& o) const {
  double s2 = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    double gap = std::max({0.0, o.lo[i] - hi[i], lo[i] - o.hi[i]});
    s2 += gap * gap;
  }
  return std::sqrt(s2);
}

bool Box::intersects_interior(const Box& o) const { return overlap_volume(o) > 0.0; }

OpenSet::OpenSet(int dim, std::vector<Box> boxes) : dim_(dim) {
  for (const auto& b : boxes)
    if (b.dim() != dim) throw std::invalid_argument("OpenSet: box dimension mismatch");
  if (dim == 1) {
    std::vector<std::pair<double, double>> iv;
    iv.reserve(boxes.size());
    for (const auto& b : boxes) iv.emplace_back(b.lo[0], b.hi[0]);
    *this = intervals(iv);
    return;
  }
  // nD: require disjoint interiors, then merge axis-aligned neighbors.
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t j = i + 1; j < boxes.size(); ++j)
      if (boxes[i].intersects_interior(boxes[j]))
        throw std::invalid_argument("OpenSet: overlapping boxes in dimension > 1");
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < boxes.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < boxes.size() && !merged; ++j) {
        int diff_axis = -1;
        bool mergeable = true;
        for (int a = 0; a < dim && mergeable; ++a) {
          if (boxes[i].lo[a] == boxes[j].lo[a] && boxes[i].hi[a] == boxes[j].hi[a]) continue;
          if (diff_axis >= 0) { mergeable = false; break; }
          diff_axis = a;
          if (boxes[i].hi[a] != boxes[j].lo[a] && boxes[j].hi[a] != boxes[i].lo[a]) mergeable = false;
        }
        if (mergeable && diff_axis >= 0) {
          boxes[i].lo[diff_axis] = std::min(boxes[i].lo[diff_axis], boxes[j].lo[diff_axis]);
          boxes[i].hi[diff_axis] = std::max(boxes[i].hi[diff_axis], boxes[j].hi[diff_axis]);
          boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
      }
    }
  }
  boxes_ = std::move(boxes);
}

OpenSet OpenSet::intervals(const std::vector<std::pair<double, double>>& iv) {
  std::vector<std::pair<double, double>> v;
  v.reserve(iv.size());
  for (auto [a, b] : iv)
    if (b > a) v.emplace_back(a, b);
  std::sort(v.begin(), v.end());
  OpenSet out(1);
  for (auto [a, b] : v) {
    if (!out.boxes_.empty() && a <= out.boxes_.back().hi[0])
      out.boxes_.back().hi[0] = std::max(out.boxes_.back().hi[0], b);
    else
      out.boxes_.push_back(Box({a}, {b}));
  }
  return out;
}

double OpenSet::measure() const {
  double m = 0.0;
  for (const auto& b : boxes_) m += b.volume();
  return m;
}

bool OpenSet::contains(const std::vector<double>& x) const {
  for (const auto& b : boxes_) {
    bool in = true;
    for (int i = 0; i < dim_ && in; ++i) in = x[i] >= b.lo[i] && x[i] < b.hi[i];
    if (in) return true;
  }
  return false;
}

double OpenSet::overlap_measure(const Box& q) const {
  double m = 0.0;
  for (const auto& b : boxes_) m += b.overlap_volume(q);
  return m;
}

double OpenSet::overlap_measure(const Cube& q) const { return overlap_measure(Box::of(q)); }

bool OpenSet::contains_cube_ae(const Cube& q, double tol) const {
  double v = q.volume();
  return overlap_measure(q) >= v * (1.0 - tol);
}

bool OpenSet::subset_of_ae(const OpenSet& o, double tol) const {
  double m = measure();
  if (m == 0) return true;
  double ov = 0.0;
  for (const auto& b : boxes_) ov += o.overlap_measure(b);
  return ov >= m * (1.0 - tol);
}

OpenSet OpenSet::intersect(const Cube& q) const {
  Box qb = Box::of(q);
  std::vector<Box> out;
  for (const auto& b : boxes_) {
    std::vector<double> lo(static_cast<std::size_t>(dim_)), hi(static_cast<std::size_t>(dim_));
    bool ok = true;
    for (int i = 0; i < dim_ && ok; ++i) {
      lo[i] = std::max(b.lo[i], qb.lo[i]);
      hi[i] = std::min(b.hi[i], qb.hi[i]);
      ok = hi[i] > lo[i];
    }
    if (ok) out.emplace_back(std::move(lo), std::move(hi));
  }
  return OpenSet(dim_, std::move(out));
}

std::optional<Box> OpenSet::bounding_box() const {
  if (boxes_.empty()) return std::nullopt;
  std::vector<double> lo(boxes_[0].lo), hi(boxes_[0].hi);
  for (const auto& b : boxes_)
    for (int i = 0; i < dim_; ++i) {
      lo[i] = std::min(lo[i], b.lo[i]);
      hi[i] = std::max(hi[i], b.hi[i]);
    }
  return Box(std::move(lo), std::move(hi));
}

void OpenSet::ensure_complement_cells() const {
  if (complement_ready_) return;
  complement_ready_ = true;
  complement_cells_.clear();
  if (boxes_.empty()) return;
  // Arrangement grid from all box faces; each grid cell is entirely inside
  // or outside the union.
  std::vector<std::vector<double>> coords(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    for (const auto& b : boxes_) {
      coords[i].push_back(b.lo[i]);
      coords[i].push_back(b.hi[i]);
    }
    std::sort(coords[i].begin(), coords[i].end());
    coords[i].erase(std::unique(coords[i].begin(), coords[i].end()), coords[i].end());
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim_), 0);
  while (true) {
    std::vector<double> lo(static_cast<std::size_t>(dim_)), hi(static_cast<std::size_t>(dim_)), mid(static_cast<std::size_t>(dim_));
    bool valid = true;
    for (int i = 0; i < dim_ && valid; ++i) {
      if (idx[i] + 1 >= coords[i].size()) { valid = false; break; }
      lo[i] = coords[i][idx[i]];
      hi[i] = coords[i][idx[i] + 1];
      mid[i] = 0.5 * (lo[i] + hi[i]);
    }
    if (valid && !contains(mid)) complement_cells_.emplace_back(lo, hi);
    int axis = 0;
    while (axis < dim_) {
      if (idx[axis] + 2 < coords[axis].size()) {
        ++idx[axis];
        for (int j = 0; j < axis; ++j) idx[j] = 0;
        break;
      }
      ++axis;
    }
    if (axis == dim_) break;
  }
}

double OpenSet::distance_to_complement(const Cube& q) const {
  ensure_complement_cells();
  auto bb = bounding_box();
  if (!bb) return 0.0;
  Box qb = Box::of(q);
  // distance to the unbounded outside of the arrangement bounding box
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim_; ++i) {
    d = std::min(d, qb.lo[i] - bb->lo[i]);
    d = std::min(d, bb->hi[i] - qb.hi[i]);
  }
  d = std::max(d, 0.0);
  for (const auto& cell : complement_cells_) d = std::min(d, qb.distance(cell));
  return d;
}

double OpenSet::distance_to_complement(const std::vector<double>& x) const {
  std::vector<double> lo(x), hi(x);
  for (double& v : hi) v += 1e-300;  // degenerate box at x
  ensure_complement_cells();
  auto bb = bounding_box();
  if (!bb) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim_; ++i) {
    d = std::min(d, x[i] - bb->lo[i]);
    d = std::min(d, bb->hi[i] - x[i]);
  }
  d = std::max(d, 0.0);
  Box xb(std::move(lo), std::move(hi));
  for (const auto& cell : complement_cells_) d = std::min(d, xb.distance(cell));
  return d;
}

namespace {

struct WhitneyBuilder {
  const OpenSet& omega;
  double R;
  int stop_generation;
  double min_side;  // dyadic indices must stay exactly representable
  std::size_t max_cells = 4'000'000;
  std::size_t visited = 0;
  std::vector<Cube> out;

  void visit(const DyadicCube& cell) {
    if (++visited > max_cells)
      throw std::runtime_error("whitney: cell budget exceeded; relax coverage_rtol");
    Cube c = cell.cube();
    double ov = omega.overlap_measure(c);
    if (ov <= 0.0) return;
    if (ov >= c.volume() * (1.0 - 1e-14)) {
      double dist = omega.distance_to_complement(c);
      if (dist >= 5.0 * R * c.diameter()) {
        out.push_back(c);
        return;
      }
    }
    if (cell.generation >= stop_generation) return;  // truncated near the boundary
    if (cell.side() * 0.5 < min_side) return;        // double-precision floor
    for (const auto& ch : cell.children()) visit(ch);
  }
};

}  // namespace

std::vector<Cube> whitney(const OpenSet& omega, double R, double coverage_rtol) {
  if (!(R >= 1.0)) throw std::invalid_argument("whitney: R must be >= 1");
  if (omega.is_empty()) return {};
  auto bb = *omega.bounding_box();
  double extent = 0.0;
  for (int i = 0; i < omega.dim(); ++i) extent = std::max(extent, bb.hi[i] - bb.lo[i]);
  double root_side = pow2_at_least(extent);
  int g0 = -std::ilogb(root_side);

  // Truncation generation: near each boundary point, cells within
  // ~(5R+2) side lengths of the complement keep subdividing, so the
  // uncovered mass at cell side h is at most ~ surface * (5R+2) * h.
  double surface = 0.0;
  for (const auto& b : omega.boxes()) {
    double v = b.volume();
    for (int i = 0; i < omega.dim(); ++i) surface += 2.0 * v / (b.hi[i] - b.lo[i]);
  }
  double per_side_cells = 8.0 * (5.0 * R + 2.0);
  double target = coverage_rtol * omega.measure() / (per_side_cells * std::max(surface, 1e-300));
  int extra = static_cast<int>(std::ceil(std::log2(root_side / std::max(target, 1e-290))));
  extra = std::clamp(extra, 4, 1020);

  double coord_scale = 1.0;
  for (int i = 0; i < omega.dim(); ++i)
    coord_scale = std::max({coord_scale, std::abs(bb.lo[i]), std::abs(bb.hi[i])});
  double min_side = coord_scale * std::ldexp(1.0, -51);

  WhitneyBuilder builder{omega, R, g0 + extra, min_side, 4'000'000, 0, {}};
  // root cells of generation g0 intersecting the bounding box
  std::vector<std::int64_t> i0(static_cast<std::size_t>(omega.dim())), i1(static_cast<std::size_t>(omega.dim()));
  for (int i = 0; i < omega.dim(); ++i) {
    i0[i] = static_cast<std::int64_t>(std::floor(std::ldexp(bb.lo[i], g0)));
    i1[i] = static_cast<std::int64_t>(std::floor(std::ldexp(bb.hi[i], g0)));
  }
  std::vector<std::int64_t> cur(i0);
  while (true) {
    builder.visit(DyadicCube(g0, cur));
    int axis = 0;
    while (axis < omega.dim()) {
      if (cur[axis] < i1[axis]) {
        ++cur[axis];
        for (int j = 0; j < axis; ++j) cur[j] = i0[j];
        break;
      }
      ++axis;
    }
    if (axis == omega.dim()) break;
  }
  return builder.out;
}

WhitneyReport whitney_validate(const OpenSet& omega, const std::vector<Cube>& cubes, double R) {
  WhitneyReport rep;
  rep.cube_count = cubes.size();

  // pairwise disjointness via a sweep along the first axis
  std::vector<std::size_t> order(cubes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cubes[a].lower[0] < cubes[b].lower[0]; });
  rep.disjoint = true;
  for (std::size_t a = 0; a < order.size() && rep.disjoint; ++a) {
    const Cube& qa = cubes[order[a]];
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const Cube& qb = cubes[order[b]];
      if (qb.lower[0] >= qa.upper(0)) break;
      double ov = qa.overlap(qb);
      if (ov > 1e-12 * std::min(qa.volume(), qb.volume())) {
        rep.disjoint = false;
        break;
      }
    }
  }

  double total = omega.measure();
  double covered = 0.0;
  bool inside = true;
  for (const auto& q : cubes) {
    covered += q.volume();
    if (!omega.contains_cube_ae(q, 1e-9)) inside = false;
  }
  rep.coverage_error_rel = total > 0 ? std::abs(total - covered) / total : 0.0;

  rep.ratio_min = std::numeric_limits<double>::infinity();
  rep.ratio_max = 0.0;
  for (const auto& q : cubes) {
    double ratio = omega.distance_to_complement(q) / q.diameter();
    rep.ratio_min = std::min(rep.ratio_min, ratio);
    rep.ratio_max = std::max(rep.ratio_max, ratio);
  }
  if (cubes.empty()) rep.ratio_min = rep.ratio_max = 0.0;
  rep.ratio_in_window = cubes.empty() ||
                        (rep.ratio_min >= 5.0 * R * (1 - 1e-9) && rep.ratio_max <= 15.0 * R * (1 + 1e-9));

  // overlap function of the dilated cubes: must vanish outside Omega, and its
  // empirical max over (a deterministic subsample of) cube centers is
  // reported; the lemma constant C(R,n) is not pinned by a specific value.
  rep.overlap_vanishes_outside = inside;
  std::vector<Cube> dilated;
  dilated.reserve(cubes.size());
  for (const auto& q : cubes) {
    Cube rq = dilate(q, R);
    dilated.push_back(rq);
    if (!omega.contains_cube_ae(rq, 1e-9)) rep.overlap_vanishes_outside = false;
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return dilated[a].lower[0] < dilated[b].lower[0]; });
  std::size_t stride = std::max<std::size_t>(1, cubes.size() / 800);
  int max_count = 0;
  for (std::size_t i = 0; i < cubes.size(); i += stride) {
    auto c = cubes[i].center();
    int count = 0;
    for (std::size_t b : order) {
      if (dilated[b].lower[0] > c[0]) break;
      if (dilated[b].contains(c)) ++count;
    }
    max_count = std::max(max_count, count);
  }
  rep.max_overlap = max_count;
  return rep;
}

}  // namespace cpw
