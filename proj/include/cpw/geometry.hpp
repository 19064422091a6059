#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace cpw {

/// Axis-aligned cube: [lower_i, lower_i + side) in each coordinate.
struct Cube {
  std::vector<double> lower;
  double side = 1.0;

  Cube() = default;
  Cube(std::vector<double> lo, double s);

  /// 1D cube [a, b).
  static Cube interval(double a, double b);

  int dim() const { return static_cast<int>(lower.size()); }
  double upper(int axis) const { return lower[axis] + side; }
  double volume() const;
  /// Euclidean diameter, side * sqrt(dim).
  double diameter() const;
  std::vector<double> center() const;

  bool contains(const std::vector<double>& x) const;
  bool contains_cube(const Cube& q) const;
  /// Lebesgue measure of the overlap with another box (side may differ per
  /// axis in `Box` form below; Cube x Cube here).
  double overlap(const Cube& q) const;
  /// Euclidean distance between the closures.
  double distance(const Cube& q) const;
};

/// Concentric dilation: same center, side gamma * side. gamma <= 0 is a
/// domain error.
Cube dilate(const Cube& q, double gamma);

/// Cube of the dyadic lattice 2^{-k}([0,1)^n + z).
struct DyadicCube {
  int generation = 0;                 // side = 2^{-generation}
  std::vector<std::int64_t> index;    // z

  DyadicCube() = default;
  DyadicCube(int k, std::vector<std::int64_t> z) : generation(k), index(std::move(z)) {}

  int dim() const { return static_cast<int>(index.size()); }
  double side() const;
  Cube cube() const;
  DyadicCube parent() const;
  std::vector<DyadicCube> children() const;
  bool contains(const DyadicCube& q) const;   // q subset of *this (or equal)
  bool operator==(const DyadicCube& o) const { return generation == o.generation && index == o.index; }
};

/// The dyadic cube of generation k whose cell contains point x.
DyadicCube dyadic_cell_at(const std::vector<double>& x, int generation);

/// At most 2^dim pairwise-disjoint dyadic cubes of one generation with side
/// in [l(Q), 2 l(Q)) whose union contains Q and sits inside dilate(Q, 5).
std::vector<DyadicCube> dyadic_cover(const Cube& q);

/// Axis-aligned half-open box with independent extents per axis. Internal
/// representation for open sets; `Cube` stays the square geometry type.
struct Box {
  std::vector<double> lo, hi;  // [lo_i, hi_i)

  Box() = default;
  Box(std::vector<double> l, std::vector<double> h);
  static Box of(const Cube& q);

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  double overlap_volume(const Box& o) const;
  double distance(const Box& o) const;  // Euclidean, between closures
  bool intersects_interior(const Box& o) const;
};

/// Finite union of pairwise-disjoint half-open boxes. 1D inputs are
/// normalized (sorted, adjacent/overlapping intervals merged); in higher
/// dimensions overlapping input boxes are rejected.
class OpenSet {
 public:
  OpenSet() = default;
  explicit OpenSet(int dim) : dim_(dim) {}
  OpenSet(int dim, std::vector<Box> boxes);

  /// 1D union of intervals.
  static OpenSet intervals(const std::vector<std::pair<double, double>>& iv);
  static OpenSet empty(int dim) { return OpenSet(dim); }

  int dim() const { return dim_; }
  bool is_empty() const { return boxes_.empty(); }
  const std::vector<Box>& boxes() const { return boxes_; }
  double measure() const;
  bool contains(const std::vector<double>& x) const;

  double overlap_measure(const Box& b) const;
  double overlap_measure(const Cube& q) const;
  /// True when q is contained in the union up to a null set.
  bool contains_cube_ae(const Cube& q, double tol = 1e-12) const;
  /// Subset test up to null sets.
  bool subset_of_ae(const OpenSet& o, double tol = 1e-12) const;
  OpenSet intersect(const Cube& q) const;

  /// Euclidean distance from the closure of q to the complement of the
  /// union. Exact (complement decomposed into boxes via the face
  /// arrangement). q must be contained in the union.
  double distance_to_complement(const Cube& q) const;
  double distance_to_complement(const std::vector<double>& x) const;

  /// Bounding box of the union; nullopt when empty.
  std::optional<Box> bounding_box() const;

 private:
  void ensure_complement_cells() const;

  int dim_ = 1;
  std::vector<Box> boxes_;
  // complement decomposition of the arrangement bounding box + outside,
  // built lazily; mutable cache, value-semantics preserved on copy.
  mutable std::vector<Box> complement_cells_;
  mutable bool complement_ready_ = false;
};

/// Validation report for a Whitney decomposition.
struct WhitneyReport {
  bool disjoint = false;
  double coverage_error_rel = 0.0;     // (|Omega| - sum |Q_j|) / |Omega|
  double ratio_min = 0.0;              // min over cubes of dist/diam
  double ratio_max = 0.0;
  bool ratio_in_window = false;        // all ratios inside [5R, 15R]
  int max_overlap = 0;                 // empirical max of sum_j 1_{R Q_j}
  bool overlap_vanishes_outside = false;
  std::size_t cube_count = 0;

  bool pass() const {
    return disjoint && ratio_in_window && overlap_vanishes_outside;
  }
};

/// Whitney decomposition of a finite box union: pairwise-disjoint dyadic
/// cubes filling Omega with 5R <= dist(Q, Omega^c)/diam(Q) <= 15R. The
/// family is truncated once the uncovered measure drops below
/// coverage_rtol * |Omega|; cubes hugging the boundary shrink forever, so
/// some truncation is inherent.
std::vector<Cube> whitney(const OpenSet& omega, double R, double coverage_rtol = 1e-13);

/// Runs the three lemma checks on a proposed decomposition.
WhitneyReport whitney_validate(const OpenSet& omega, const std::vector<Cube>& cubes, double R);

}  // namespace cpw
