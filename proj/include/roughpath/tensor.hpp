#pragma once

// Group elements of the truncated tensor algebra T^(n)(R^d).
//
// An element is stored as dense coefficient blocks for levels 1..n, block k
// holding d^k entries in row-major multi-index order (i1, ..., ik). Level 0 is
// the scalar 1 and is not stored: only group elements are representable.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rp {

inline constexpr int kMaxDepth = 8;

/// Default absolute tolerance for unit-scale equality checks.
inline constexpr double kDefaultTolerance = 1e-12;

class TruncatedTensor {
 public:
  /// Identity element of T^(depth)(R^dim).
  TruncatedTensor(int dim, int depth);

  static TruncatedTensor identity(int dim, int depth) { return {dim, depth}; }

  int dim() const noexcept { return dim_; }
  int depth() const noexcept { return depth_; }

  /// Number of entries in level k ≥ 1 (d^k).
  std::size_t level_size(int k) const noexcept { return offsets_[k] - offsets_[k - 1]; }

  /// Start of level k ≥ 1 inside coefficients().
  std::size_t level_offset(int k) const noexcept { return offsets_[k - 1]; }

  std::span<double> level(int k);
  std::span<const double> level(int k) const;

  /// All stored coefficients (levels 1..n concatenated).
  std::span<double> coefficients() noexcept { return data_; }
  std::span<const double> coefficients() const noexcept { return data_; }

  bool same_shape(const TruncatedTensor& other) const noexcept {
    return dim_ == other.dim_ && depth_ == other.depth_;
  }

  bool is_identity() const noexcept;

 private:
  int dim_;
  int depth_;
  // level k occupies [offsets_[k-1], offsets_[k]) of data_
  std::array<std::size_t, kMaxDepth + 1> offsets_{};
  std::vector<double> data_;
};

/// Product g ⊗ h truncated at the common depth.
TruncatedTensor mul(const TruncatedTensor& g, const TruncatedTensor& h);

/// out = g ⊗ h without allocating; out must not alias g or h.
void mul_into(TruncatedTensor& out, const TruncatedTensor& g, const TruncatedTensor& h);

/// Group inverse via the alternating sum Σ_j (-1)^j (g - 1)^{⊗j}.
TruncatedTensor inverse(const TruncatedTensor& g);

/// Euclidean (Frobenius) norm of level k.
double level_norm(const TruncatedTensor& g, int k);

/// Σ_k |π_k(g)|^{1/k}.
double homogeneous_norm(const TruncatedTensor& g);

/// Dilation δ_c: level k scaled by c^k.
TruncatedTensor dilate(const TruncatedTensor& g, double c);

/// Restriction to depth n ≤ g.depth(), or zero-extension when n is larger.
TruncatedTensor truncate(const TruncatedTensor& g, int n);

/// max_k max_i |π_k(g)_i - π_k(h)_i|.
double max_abs_diff(const TruncatedTensor& g, const TruncatedTensor& h);

bool approx_equal(const TruncatedTensor& g, const TruncatedTensor& h,
                  double tol = kDefaultTolerance);

/// Tensor exponential of a Lie-type element x = v + L (levels 1 and 2 only),
/// truncated at depth n. L may carry a symmetric part.
TruncatedTensor exp_levels12(std::span<const double> v, std::span<const double> L, int dim,
                             int n);

/// Symmetric and antisymmetric parts of a d×d row-major block.
std::vector<double> sym_part(std::span<const double> a, int d);
std::vector<double> anti_part(std::span<const double> a, int d);

/// Split of a depth-2 element into its weakly geometric part and its symmetric
/// drift: π₂(g) = Anti(π₂ g) + drift + ½ π₁(g)^{⊗2}.
struct Decomposition {
  TruncatedTensor geometric;
  std::vector<double> drift;  // symmetric d×d, row-major
};

Decomposition decompose_geo_drift(const TruncatedTensor& g);

/// Inverse of decompose_geo_drift.
TruncatedTensor recombine(const Decomposition& dec);

}  // namespace rp
