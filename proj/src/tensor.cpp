#include "roughpath/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "roughpath/error.hpp"

namespace rp {

TruncatedTensor::TruncatedTensor(int dim, int depth) : dim_(dim), depth_(depth) {
  require(dim >= 1, "tensor dimension must be >= 1");
  require(depth >= 1 && depth <= kMaxDepth, "tensor depth must be in [1, 8]");
  std::size_t width = 1;
  offsets_[0] = 0;
  for (int k = 1; k <= depth; ++k) {
    width *= static_cast<std::size_t>(dim);
    offsets_[k] = offsets_[k - 1] + width;
  }
  data_.assign(offsets_[depth], 0.0);
}

std::span<double> TruncatedTensor::level(int k) {
  require(k >= 1 && k <= depth_, "tensor level out of range");
  return {data_.data() + offsets_[k - 1], level_size(k)};
}

std::span<const double> TruncatedTensor::level(int k) const {
  require(k >= 1 && k <= depth_, "tensor level out of range");
  return {data_.data() + offsets_[k - 1], level_size(k)};
}

bool TruncatedTensor::is_identity() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return x == 0.0; });
}

namespace {

// out_k += a ⊗ b for blocks a (size d^i) and b (size d^j).
inline void outer_add(double* out, const double* a, std::size_t na, const double* b,
                      std::size_t nb) {
  for (std::size_t i = 0; i < na; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    double* row = out + i * nb;
    for (std::size_t j = 0; j < nb; ++j) row[j] += ai * b[j];
  }
}

// Levels of x ⊗ r where x has zero scalar part and r has scalar part r0.
// Result has zero scalar part. Buffers are full-depth coefficient vectors.
void nilpotent_times(const TruncatedTensor& shape, std::span<const double> x,
                     std::span<const double> r, double r0, std::vector<double>& out) {
  const int n = shape.depth();
  out.assign(x.size(), 0.0);
  for (int k = 1; k <= n; ++k) {
    const std::size_t nk = shape.level_size(k);
    double* dst = out.data() + shape.level_offset(k);
    // j = level of x (>= 1), k - j = level of r
    for (int j = 1; j <= k; ++j) {
      const double* xj = x.data() + shape.level_offset(j);
      if (j == k) {
        for (std::size_t i = 0; i < nk; ++i) dst[i] += xj[i] * r0;
      } else {
        const int m = k - j;
        outer_add(dst, xj, shape.level_size(j), r.data() + shape.level_offset(m),
                  shape.level_size(m));
      }
    }
  }
}

}  // namespace

void mul_into(TruncatedTensor& out, const TruncatedTensor& g, const TruncatedTensor& h) {
  require(g.same_shape(h), "tensor_mul: dimension/depth mismatch");
  require(out.same_shape(g), "tensor_mul: output shape mismatch");
  const int n = g.depth();
  for (int k = 1; k <= n; ++k) {
    auto dst = out.level(k);
    auto gk = g.level(k);
    auto hk = h.level(k);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = gk[i] + hk[i];
    for (int j = 1; j < k; ++j) {
      auto gj = g.level(j);
      auto hm = h.level(k - j);
      outer_add(dst.data(), gj.data(), gj.size(), hm.data(), hm.size());
    }
  }
}

TruncatedTensor mul(const TruncatedTensor& g, const TruncatedTensor& h) {
  require(g.same_shape(h), "tensor_mul: dimension/depth mismatch");
  TruncatedTensor out(g.dim(), g.depth());
  mul_into(out, g, h);
  return out;
}

TruncatedTensor inverse(const TruncatedTensor& g) {
  // Horner form of Σ_{j=0}^{n} (-x)^j with x = g - 1: r <- 1 - x ⊗ r, n times.
  const int n = g.depth();
  TruncatedTensor r(g.dim(), n);
  std::vector<double> tmp;
  for (int it = 0; it < n; ++it) {
    nilpotent_times(g, g.coefficients(), r.coefficients(), 1.0, tmp);
    auto c = r.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = -tmp[i];
  }
  return r;
}

double level_norm(const TruncatedTensor& g, int k) {
  double s = 0.0;
  for (double x : g.level(k)) s += x * x;
  return std::sqrt(s);
}

double homogeneous_norm(const TruncatedTensor& g) {
  double s = 0.0;
  for (int k = 1; k <= g.depth(); ++k) {
    const double nk = level_norm(g, k);
    s += k == 1 ? nk : std::pow(nk, 1.0 / k);
  }
  return s;
}

TruncatedTensor dilate(const TruncatedTensor& g, double c) {
  TruncatedTensor out = g;
  double ck = 1.0;
  for (int k = 1; k <= g.depth(); ++k) {
    ck *= c;
    for (double& x : out.level(k)) x *= ck;
  }
  return out;
}

TruncatedTensor truncate(const TruncatedTensor& g, int n) {
  TruncatedTensor out(g.dim(), n);
  for (int k = 1; k <= std::min(n, g.depth()); ++k) {
    auto src = g.level(k);
    std::copy(src.begin(), src.end(), out.level(k).begin());
  }
  return out;
}

double max_abs_diff(const TruncatedTensor& g, const TruncatedTensor& h) {
  require(g.same_shape(h), "max_abs_diff: shape mismatch");
  double m = 0.0;
  auto a = g.coefficients();
  auto b = h.coefficients();
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool approx_equal(const TruncatedTensor& g, const TruncatedTensor& h, double tol) {
  return g.same_shape(h) && max_abs_diff(g, h) <= tol;
}

TruncatedTensor exp_levels12(std::span<const double> v, std::span<const double> L, int dim,
                             int n) {
  const auto d = static_cast<std::size_t>(dim);
  require(v.size() == d, "exp: level-1 size mismatch");
  require(L.empty() || L.size() == d * d, "exp: level-2 size mismatch");
  TruncatedTensor r(dim, n);
  std::vector<double> x(r.coefficients().size(), 0.0);
  std::copy(v.begin(), v.end(), x.begin());
  if (n >= 2 && !L.empty()) std::copy(L.begin(), L.end(), x.begin() + static_cast<long>(d));
  // exp(x) = 1 + x(1 + x/2(1 + x/3(...))), innermost factor 1 + x/n.
  std::vector<double> tmp;
  std::vector<double> acc(x.size(), 0.0);  // acc holds r - 1
  for (int k = n; k >= 1; --k) {
    nilpotent_times(r, x, acc, 1.0, tmp);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = tmp[i] / k;
  }
  std::copy(acc.begin(), acc.end(), r.coefficients().begin());
  return r;
}

std::vector<double> sym_part(std::span<const double> a, int d) {
  std::vector<double> s(a.size());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s[i * d + j] = 0.5 * (a[i * d + j] + a[j * d + i]);
  return s;
}

std::vector<double> anti_part(std::span<const double> a, int d) {
  std::vector<double> s(a.size());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s[i * d + j] = 0.5 * (a[i * d + j] - a[j * d + i]);
  return s;
}

Decomposition decompose_geo_drift(const TruncatedTensor& g) {
  require(g.depth() == 2, "decompose_geo_drift: depth must be 2");
  const int d = g.dim();
  auto v = g.level(1);
  auto a = g.level(2);
  Decomposition dec{TruncatedTensor(d, 2), sym_part(a, d)};
  auto anti = anti_part(a, d);
  std::copy(v.begin(), v.end(), dec.geometric.level(1).begin());
  auto geo2 = dec.geometric.level(2);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double half_vv = 0.5 * v[i] * v[j];
      geo2[i * d + j] = anti[i * d + j] + half_vv;
      dec.drift[i * d + j] -= half_vv;
    }
  }
  return dec;
}

TruncatedTensor recombine(const Decomposition& dec) {
  const int d = dec.geometric.dim();
  require(dec.geometric.depth() == 2, "recombine: depth must be 2");
  require(dec.drift.size() == static_cast<std::size_t>(d * d), "recombine: drift size");
  TruncatedTensor g = dec.geometric;
  auto a = g.level(2);
  auto anti = anti_part(dec.geometric.level(2), d);
  auto v = g.level(1);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      a[i * d + j] = anti[i * d + j] + dec.drift[i * d + j] + 0.5 * v[i] * v[j];
  return g;
}

}  // namespace rp
