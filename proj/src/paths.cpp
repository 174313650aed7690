#include "roughpath/paths.hpp"

#include <algorithm>
#include <cmath>

#include "roughpath/error.hpp"

namespace rp {

void validate_times(std::span<const double> times, std::size_t min_points) {
  require(times.size() >= min_points,
          "grid needs at least " + std::to_string(min_points) + " points");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(std::isfinite(times[i]), "grid times must be finite");
    if (i > 0) require(times[i] > times[i - 1], "grid times must be strictly increasing");
  }
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t steps) {
  require(steps >= 1 && t1 > t0, "uniform_grid: need t1 > t0 and steps >= 1");
  std::vector<double> t(steps + 1);
  const double h = (t1 - t0) / static_cast<double>(steps);
  for (std::size_t i = 0; i <= steps; ++i) t[i] = t0 + h * static_cast<double>(i);
  t[steps] = t1;
  return t;
}

GridPath::GridPath(std::vector<double> times, int dim, std::vector<double> values)
    : times_(std::move(times)), dim_(dim), values_(std::move(values)) {
  require(dim >= 1, "GridPath: dim must be >= 1");
  validate_times(times_);
  require(values_.size() == times_.size() * static_cast<std::size_t>(dim),
          "GridPath: values size does not match grid");
  for (double v : values_) require(std::isfinite(v), "GridPath: values must be finite");
}

GridPath GridPath::zeros(std::vector<double> times, int dim) {
  const std::size_t n = times.size() * static_cast<std::size_t>(dim);
  return GridPath(std::move(times), dim, std::vector<double>(n, 0.0));
}

std::vector<double> GridPath::increment(std::size_t i, std::size_t j) const {
  auto a = at(i);
  auto b = at(j);
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = b[k] - a[k];
  return out;
}

GroupPath::GroupPath(std::vector<double> times, std::vector<TruncatedTensor> elements)
    : times_(std::move(times)), elements_(std::move(elements)) {
  validate_times(times_);
  require(elements_.size() == times_.size(), "GroupPath: one element per time required");
  for (const auto& g : elements_)
    require(g.same_shape(elements_.front()), "GroupPath: elements must share dim/depth");
}

GroupPath GroupPath::identity(std::vector<double> times, int dim, int depth) {
  std::vector<TruncatedTensor> el(times.size(), TruncatedTensor(dim, depth));
  return GroupPath(std::move(times), std::move(el));
}

TruncatedTensor GroupPath::increment(std::size_t i, std::size_t j) const {
  require(i < size() && j < size(), "increment: index out of range");
  require(i <= j, "increment: need i <= j");
  if (i == 0 && elements_[0].is_identity()) return elements_[j];
  return mul(inverse(elements_[i]), elements_[j]);
}

GridPath GroupPath::first_level() const {
  const int d = dim();
  std::vector<double> v;
  v.reserve(size() * static_cast<std::size_t>(d));
  for (const auto& g : elements_) {
    auto l1 = g.level(1);
    v.insert(v.end(), l1.begin(), l1.end());
  }
  return GridPath(times_, d, std::move(v));
}

BracketGrid::BracketGrid(std::vector<double> times, int dim, std::vector<double> values)
    : times_(std::move(times)), dim_(dim), values_(std::move(values)) {
  require(dim >= 1, "BracketGrid: dim must be >= 1");
  validate_times(times_);
  require(values_.size() == times_.size() * static_cast<std::size_t>(dim * dim),
          "BracketGrid: values size does not match grid");
}

BracketGrid BracketGrid::zeros(std::vector<double> times, int dim) {
  const std::size_t n = times.size() * static_cast<std::size_t>(dim * dim);
  return BracketGrid(std::move(times), dim, std::vector<double>(n, 0.0));
}

GridPath BracketGrid::as_path() const { return GridPath(times_, dim_ * dim_, values_); }

bool locate_subgrid(std::span<const double> grid, std::span<const double> sub,
                    std::vector<std::size_t>& indices) {
  indices.clear();
  std::size_t pos = 0;
  for (double t : sub) {
    auto it = std::lower_bound(grid.begin() + static_cast<long>(pos), grid.end(), t);
    if (it == grid.end() || *it != t) return false;
    pos = static_cast<std::size_t>(it - grid.begin());
    indices.push_back(pos);
  }
  return true;
}

std::vector<std::size_t> dyadic_indices(std::size_t steps, int m) {
  require(m >= 0 && m < 63, "dyadic_indices: level out of range");
  const std::size_t parts = std::size_t{1} << m;
  require(steps % parts == 0, "dyadic_indices: 2^m must divide the number of grid steps");
  const std::size_t stride = steps / parts;
  std::vector<std::size_t> idx(parts + 1);
  for (std::size_t k = 0; k <= parts; ++k) idx[k] = k * stride;
  return idx;
}

namespace {
void check_indices(std::span<const std::size_t> indices, std::size_t n) {
  require(!indices.empty(), "restrict_to: empty index set");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    require(indices[k] < n, "restrict_to: index out of range");
    if (k > 0) require(indices[k] > indices[k - 1], "restrict_to: indices must increase");
  }
}
}  // namespace

GroupPath restrict_to(const GroupPath& path, std::span<const std::size_t> indices) {
  check_indices(indices, path.size());
  std::vector<double> t;
  std::vector<TruncatedTensor> el;
  t.reserve(indices.size());
  el.reserve(indices.size());
  // Re-base so the restricted path starts at the identity.
  const TruncatedTensor base_inv = inverse(path[indices.front()]);
  for (std::size_t i : indices) {
    t.push_back(path.times()[i]);
    el.push_back(mul(base_inv, path[i]));
  }
  return GroupPath(std::move(t), std::move(el));
}

GridPath restrict_to(const GridPath& path, std::span<const std::size_t> indices) {
  check_indices(indices, path.size());
  std::vector<double> t;
  std::vector<double> v;
  for (std::size_t i : indices) {
    t.push_back(path.times()[i]);
    auto row = path.at(i);
    v.insert(v.end(), row.begin(), row.end());
  }
  return GridPath(std::move(t), path.dim(), std::move(v));
}

}  // namespace rp
