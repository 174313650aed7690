#pragma once

// Signatures of piecewise-linear paths, Chen increments, extension of depth-2
// rough paths to higher levels, and grid-restricted p-variation / d_p.
//
// The p-variation routines take the supremum over partitions made of grid
// points only. For sampled data this is a lower bound on the continuous-time
// supremum; refining the grid shows how close it is.

#include <span>

#include "roughpath/paths.hpp"
#include "roughpath/tensor.hpp"

namespace rp {

/// exp(v) in T^(n)(R^d): levels v^{⊗k}/k!.
TruncatedTensor segment_signature(std::span<const double> v, int n);

/// Running Chen product of segment signatures; identity at t₀.
SignaturePath pl_signature(const GridPath& x, int n);

/// s_i^{-1} ⊗ s_j.
TruncatedTensor chen_increment(const GroupPath& s, std::size_t i, std::size_t j);

/// Depth-2 group logarithm of g: level 1 = π₁ g, level 2 = π₂ g - ½ (π₁ g)^{⊗2}.
/// The level-2 part holds the area and, for non-geometric g, the symmetric drift.
std::vector<double> log2_level2(const TruncatedTensor& g);

/// Extends a depth-2 rough path to depth n ≥ 3 by exponentiating the depth-2
/// logarithm of each grid increment and Chen-concatenating.
SignaturePath lyons_extend(const RoughPathGrid& gamma, int n);

/// Grid p-variation of a group-valued path with the homogeneous norm.
double p_variation(const GroupPath& s, double p);

/// Grid p-variation of an R^d path with the Euclidean norm of increments.
double p_variation(const GridPath& x, double p);

/// d_p between two depth-2 paths on the same grid, p ∈ [2, 3):
/// max_{k=1,2} sup_D (Σ |π_k(γ_{s,t}) - π_k(γ̃_{s,t})|^{p/k})^{1/p}.
double dp_distance(const RoughPathGrid& a, const RoughPathGrid& b, double p);

/// Generic grid p-variation: sup over sub-partitions of Σ cost(i, j), where
/// cost(i, j) is the already-powered contribution of [t_i, t_j]. Returns the
/// supremum itself, not its root. O(N²) calls to cost.
template <typename Cost>
double grid_partition_sup(std::size_t points, Cost&& cost) {
  if (points < 2) return 0.0;
  std::vector<double> best(points, 0.0);
  for (std::size_t j = 1; j < points; ++j) {
    double b = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      const double v = best[i] + cost(i, j);
      if (v > b) b = v;
    }
    best[j] = b;
  }
  return best.back();
}

}  // namespace rp
