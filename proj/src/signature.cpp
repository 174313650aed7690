#include "roughpath/signature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "roughpath/error.hpp"

namespace rp {

TruncatedTensor segment_signature(std::span<const double> v, int n) {
  const int d = static_cast<int>(v.size());
  TruncatedTensor g(d, n);
  auto l1 = g.level(1);
  std::copy(v.begin(), v.end(), l1.begin());
  for (int k = 2; k <= n; ++k) {
    auto prev = g.level(k - 1);
    auto cur = g.level(k);
    const double inv_k = 1.0 / k;
    for (std::size_t i = 0; i < prev.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) cur[i * v.size() + j] = prev[i] * v[j] * inv_k;
  }
  return g;
}

SignaturePath pl_signature(const GridPath& x, int n) {
  require(x.size() >= 2, "pl_signature: need at least 2 grid points");
  std::vector<TruncatedTensor> el;
  el.reserve(x.size());
  el.emplace_back(x.dim(), n);
  TruncatedTensor next(x.dim(), n);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const auto seg = segment_signature(x.increment(i, i + 1), n);
    mul_into(next, el.back(), seg);
    el.push_back(next);
  }
  return SignaturePath(x.times(), std::move(el));
}

TruncatedTensor chen_increment(const GroupPath& s, std::size_t i, std::size_t j) {
  return s.increment(i, j);
}

std::vector<double> log2_level2(const TruncatedTensor& g) {
  require(g.depth() >= 2, "log2_level2: depth must be >= 2");
  const int d = g.dim();
  auto v = g.level(1);
  auto a = g.level(2);
  std::vector<double> L(a.begin(), a.end());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) L[i * d + j] -= 0.5 * v[i] * v[j];
  return L;
}

SignaturePath lyons_extend(const RoughPathGrid& gamma, int n) {
  require(n >= 3, "lyons_extend: target depth must be >= 3");
  require(gamma.depth() == 2, "lyons_extend: input must have depth 2");
  require(gamma.size() >= 1, "lyons_extend: empty path");
  std::vector<TruncatedTensor> el;
  el.reserve(gamma.size());
  // The path is re-based at its first element.
  el.emplace_back(gamma.dim(), n);
  TruncatedTensor next(gamma.dim(), n);
  for (std::size_t i = 0; i + 1 < gamma.size(); ++i) {
    const auto inc = gamma.increment(i, i + 1);
    const auto L = log2_level2(inc);
    const auto step = exp_levels12(inc.level(1), L, gamma.dim(), n);
    mul_into(next, el.back(), step);
    el.push_back(next);
  }
  return SignaturePath(gamma.times(), std::move(el));
}

double p_variation(const GroupPath& s, double p) {
  require(p >= 1.0, "p_variation: p must be >= 1");
  if (s.size() < 2) return 0.0;
  std::vector<TruncatedTensor> inv;
  inv.reserve(s.size());
  for (const auto& g : s.elements()) inv.push_back(inverse(g));
  TruncatedTensor scratch(s.dim(), s.depth());
  const double sup = grid_partition_sup(s.size(), [&](std::size_t i, std::size_t j) {
    mul_into(scratch, inv[i], s[j]);
    return std::pow(homogeneous_norm(scratch), p);
  });
  return std::pow(sup, 1.0 / p);
}

double p_variation(const GridPath& x, double p) {
  require(p >= 1.0, "p_variation: p must be >= 1");
  const auto d = static_cast<std::size_t>(x.dim());
  const double sup = grid_partition_sup(x.size(), [&](std::size_t i, std::size_t j) {
    auto a = x.at(i);
    auto b = x.at(j);
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += (b[k] - a[k]) * (b[k] - a[k]);
    return std::pow(std::sqrt(s), p);
  });
  return std::pow(sup, 1.0 / p);
}

double dp_distance(const RoughPathGrid& a, const RoughPathGrid& b, double p) {
  require(a.depth() == 2 && b.depth() == 2, "dp_distance: depth-2 paths required");
  require(a.dim() == b.dim(), "dp_distance: dimension mismatch");
  require(a.times() == b.times(), "dp_distance: paths must share the time grid");
  require(p >= 1.0, "dp_distance: p must be >= 1");
  const int d = a.dim();
  const std::size_t n = a.size();
  if (n < 2) return 0.0;

  // Depth-2 increments in closed form: level 1 = x_j - x_i,
  // level 2 = A_j - A_i - x_i ⊗ (x_j - x_i). Coefficients are copied into flat
  // arrays first; the O(N²) loops below dominate the cost.
  const auto du = static_cast<std::size_t>(d);
  std::vector<double> xa(n * du), xb(n * du), aa(n * du * du), ab(n * du * du);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(a[i].level(1).begin(), du, xa.begin() + i * du);
    std::copy_n(b[i].level(1).begin(), du, xb.begin() + i * du);
    std::copy_n(a[i].level(2).begin(), du * du, aa.begin() + i * du * du);
    std::copy_n(b[i].level(2).begin(), du * du, ab.begin() + i * du * du);
  }
  // squared Euclidean norm of the level-k difference over [t_i, t_j]
  auto diff_sq = [&](int k, std::size_t i, std::size_t j) {
    const double* pa_i = &xa[i * du];
    const double* pa_j = &xa[j * du];
    const double* pb_i = &xb[i * du];
    const double* pb_j = &xb[j * du];
    double s = 0.0;
    if (k == 1) {
      for (std::size_t q = 0; q < du; ++q) {
        const double r = (pa_j[q] - pa_i[q]) - (pb_j[q] - pb_i[q]);
        s += r * r;
      }
      return s;
    }
    const double* qa_i = &aa[i * du * du];
    const double* qa_j = &aa[j * du * du];
    const double* qb_i = &ab[i * du * du];
    const double* qb_j = &ab[j * du * du];
    for (std::size_t q = 0; q < du; ++q) {
      for (std::size_t r = 0; r < du; ++r) {
        const std::size_t idx = q * du + r;
        const double ia = qa_j[idx] - qa_i[idx] - pa_i[q] * (pa_j[r] - pa_i[r]);
        const double ib = qb_j[idx] - qb_i[idx] - pb_i[q] * (pb_j[r] - pb_i[r]);
        s += (ia - ib) * (ia - ib);
      }
    }
    return s;
  };

  double result = 0.0;
  for (int k = 1; k <= 2; ++k) {
    const double half_expo = p / (2.0 * k);  // |·|^{p/k} = (|·|²)^{p/2k}
    const double sup = grid_partition_sup(
        n, [&](std::size_t i, std::size_t j) { return std::pow(diff_sq(k, i, j), half_expo); });
    result = std::max(result, std::pow(sup, 1.0 / p));
  }
  return result;
}

}  // namespace rp
