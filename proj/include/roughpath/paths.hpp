#pragma once

// Grid-sampled paths: plain R^d paths, group-valued paths and bracket paths.

#include <cstddef>
#include <span>
#include <vector>

#include "roughpath/tensor.hpp"

namespace rp {

/// Checks that times are finite and strictly increasing with at least `min_points`.
void validate_times(std::span<const double> times, std::size_t min_points = 1);

/// Uniform grid t_i = t0 + i (T - t0) / steps, i = 0..steps.
std::vector<double> uniform_grid(double t0, double t1, std::size_t steps);

/// A path in R^d sampled on a strictly increasing grid. Values are row-major,
/// one row of `dim` coordinates per time.
class GridPath {
 public:
  GridPath() = default;
  GridPath(std::vector<double> times, int dim, std::vector<double> values);

  /// Constant-zero path on the given grid.
  static GridPath zeros(std::vector<double> times, int dim);

  std::size_t size() const noexcept { return times_.size(); }
  std::size_t steps() const noexcept { return times_.empty() ? 0 : times_.size() - 1; }
  int dim() const noexcept { return dim_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }

  std::span<const double> at(std::size_t i) const {
    return {values_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<double> at(std::size_t i) {
    return {values_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  /// X_{t_j} - X_{t_i}.
  std::vector<double> increment(std::size_t i, std::size_t j) const;

 private:
  std::vector<double> times_;
  int dim_ = 0;
  std::vector<double> values_;
};

/// A path of group elements sharing dim and depth. With depth 2 this is a
/// sampled p-rough path; at higher depth it is a signature path.
class GroupPath {
 public:
  GroupPath() = default;
  GroupPath(std::vector<double> times, std::vector<TruncatedTensor> elements);

  /// Constant identity path.
  static GroupPath identity(std::vector<double> times, int dim, int depth);

  std::size_t size() const noexcept { return times_.size(); }
  std::size_t steps() const noexcept { return times_.empty() ? 0 : times_.size() - 1; }
  int dim() const noexcept { return elements_.empty() ? 0 : elements_.front().dim(); }
  int depth() const noexcept { return elements_.empty() ? 0 : elements_.front().depth(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<TruncatedTensor>& elements() const noexcept { return elements_; }
  const TruncatedTensor& operator[](std::size_t i) const { return elements_[i]; }

  /// element_i^{-1} ⊗ element_j.
  TruncatedTensor increment(std::size_t i, std::size_t j) const;

  /// Level-1 path π₁(element_t).
  GridPath first_level() const;

 private:
  std::vector<double> times_;
  std::vector<TruncatedTensor> elements_;
};

using RoughPathGrid = GroupPath;
using SignaturePath = GroupPath;

/// Symmetric d×d matrices on a grid, starting at 0: the bracket ⟨Z⟩.
class BracketGrid {
 public:
  BracketGrid() = default;
  BracketGrid(std::vector<double> times, int dim, std::vector<double> values);

  static BracketGrid zeros(std::vector<double> times, int dim);

  std::size_t size() const noexcept { return times_.size(); }
  int dim() const noexcept { return dim_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }

  std::span<const double> at(std::size_t i) const {
    const auto w = static_cast<std::size_t>(dim_ * dim_);
    return {values_.data() + i * w, w};
  }

  /// Flattened as a path in R^{d·d}, for p-variation of bracket differences.
  GridPath as_path() const;

 private:
  std::vector<double> times_;
  int dim_ = 0;
  std::vector<double> values_;
};

/// True when every time of `sub` appears (exactly) in `grid`; fills the indices.
bool locate_subgrid(std::span<const double> grid, std::span<const double> sub,
                    std::vector<std::size_t>& indices);

/// Indices {0, s, 2s, ..., N} of the dyadic partition D_m of an N-step grid,
/// s = N / 2^m. Requires 2^m to divide N.
std::vector<std::size_t> dyadic_indices(std::size_t steps, int m);

/// The path sampled at the given grid indices.
GroupPath restrict_to(const GroupPath& path, std::span<const std::size_t> indices);
GridPath restrict_to(const GridPath& path, std::span<const std::size_t> indices);

}  // namespace rp
