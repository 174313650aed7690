#include "roughpath/stochastic.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "roughpath/error.hpp"
#include "roughpath/signature.hpp"

namespace rp {

GridPath sample_brownian(const std::vector<double>& times, int d, RandomStream& rng) {
  validate_times(times);
  require(d >= 1, "sample_brownian: d must be >= 1");
  const auto w = static_cast<std::size_t>(d);
  std::vector<double> v(times.size() * w, 0.0);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double sd = std::sqrt(times[i + 1] - times[i]);
    for (std::size_t k = 0; k < w; ++k) v[(i + 1) * w + k] = v[i * w + k] + sd * rng.normal();
  }
  return GridPath(times, d, std::move(v));
}

GridPath sample_brownian(const std::vector<double>& times, int d, std::uint64_t seed) {
  RandomStream rng(seed);
  return sample_brownian(times, d, rng);
}

int NoiseSpec::dim() const {
  const int dd = phi.dim();
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dd))));
  require(d * d == dd, "NoiseSpec: phi must hold d×d matrices");
  return d;
}

NoiseSpec NoiseSpec::scaled_identity(std::vector<double> times, int d, double c,
                                     std::uint64_t seed, std::size_t paths) {
  const auto w = static_cast<std::size_t>(d * d);
  std::vector<double> v(times.size() * w, 0.0);
  for (std::size_t i = 0; i < times.size(); ++i)
    for (int k = 0; k < d; ++k) v[i * w + static_cast<std::size_t>(k * d + k)] = c;
  return NoiseSpec{GridPath(std::move(times), d * d, std::move(v)), seed, paths};
}

GridPath martingale_from_phi(const GridPath& phi, const GridPath& brownian) {
  const int d = brownian.dim();
  require(phi.dim() == d * d, "martingale_from_phi: phi must be d×d");
  require(phi.times() == brownian.times(), "martingale_from_phi: phi grid mismatch");
  const auto w = static_cast<std::size_t>(d);
  std::vector<double> v(brownian.size() * w, 0.0);
  for (std::size_t i = 0; i + 1 < brownian.size(); ++i) {
    auto p = phi.at(i);
    auto b0 = brownian.at(i);
    auto b1 = brownian.at(i + 1);
    for (std::size_t r = 0; r < w; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < w; ++c) s += p[r * w + c] * (b1[c] - b0[c]);
      v[(i + 1) * w + r] = v[i * w + r] + s;
    }
  }
  return GridPath(brownian.times(), d, std::move(v));
}

void replica_step_normals(std::uint64_t seed, std::uint64_t replica, std::uint64_t step,
                          std::span<double> out) {
  RandomStream rng(seed, {replica, step});
  for (double& x : out) x = rng.normal();
}

GridPath replica_brownian(const std::vector<double>& times, int d, std::uint64_t seed,
                          std::uint64_t replica) {
  validate_times(times);
  require(d >= 1, "replica_brownian: d must be >= 1");
  const auto w = static_cast<std::size_t>(d);
  std::vector<double> v(times.size() * w, 0.0), z(w);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    replica_step_normals(seed, replica, i, z);
    const double sd = std::sqrt(times[i + 1] - times[i]);
    for (std::size_t k = 0; k < w; ++k) v[(i + 1) * w + k] = v[i * w + k] + sd * z[k];
  }
  return GridPath(times, d, std::move(v));
}

GridPath martingale_from_phi(const NoiseSpec& spec, std::uint64_t replica) {
  return martingale_from_phi(spec.phi,
                             replica_brownian(spec.phi.times(), spec.dim(), spec.seed, replica));
}

RoughPathGrid make_depth2(const std::vector<double>& times, int d, std::span<const double> level1,
                          std::span<const double> level2) {
  const auto w = static_cast<std::size_t>(d);
  require(level1.size() == times.size() * w, "make_depth2: level-1 size");
  require(level2.size() == times.size() * w * w, "make_depth2: level-2 size");
  std::vector<TruncatedTensor> el;
  el.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    TruncatedTensor g(d, 2);
    std::copy_n(level1.begin() + static_cast<long>(i * w), w, g.level(1).begin());
    std::copy_n(level2.begin() + static_cast<long>(i * w * w), w * w, g.level(2).begin());
    el.push_back(std::move(g));
  }
  return RoughPathGrid(times, std::move(el));
}

namespace {

// weight = 0 gives left-point sums, 0.5 the trapezoid rule.
RoughPathGrid lift_with_weight(const GridPath& z, double weight) {
  require(z.size() >= 2, "lift: need at least 2 grid points");
  const auto d = static_cast<std::size_t>(z.dim());
  std::vector<double> l1(z.size() * d, 0.0), l2(z.size() * d * d, 0.0);
  auto z0 = z.at(0);
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    auto a = z.at(i);
    auto b = z.at(i + 1);
    for (std::size_t q = 0; q < d; ++q) l1[(i + 1) * d + q] = b[q] - z0[q];
    for (std::size_t q = 0; q < d; ++q) {
      const double base = (a[q] - z0[q]) + weight * (b[q] - a[q]);
      for (std::size_t r = 0; r < d; ++r) {
        const std::size_t idx = q * d + r;
        l2[(i + 1) * d * d + idx] = l2[i * d * d + idx] + base * (b[r] - a[r]);
      }
    }
  }
  return make_depth2(z.times(), z.dim(), l1, l2);
}

std::vector<std::size_t> partition_indices(const GridPath& z, std::span<const double> partition) {
  std::vector<std::size_t> idx;
  require(partition.size() >= 2, "partition needs at least 2 points");
  require(locate_subgrid(z.times(), partition, idx), "partition is not a sub-grid of the path grid");
  require(idx.front() == 0 && idx.back() == z.size() - 1,
          "partition must contain both grid endpoints");
  return idx;
}

}  // namespace

RoughPathGrid ito_lift(const GridPath& z) { return lift_with_weight(z, 0.0); }

RoughPathGrid strat_lift(const GridPath& z) { return lift_with_weight(z, 0.5); }

BracketGrid bracket_pl(const GridPath& z, std::span<const double> partition) {
  const auto idx = partition_indices(z, partition);
  const auto d = static_cast<std::size_t>(z.dim());
  const auto& t = z.times();
  std::vector<double> v(z.size() * d * d, 0.0);
  for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
    const std::size_t a = idx[k], b = idx[k + 1];
    const auto inc = z.increment(a, b);
    for (std::size_t i = a + 1; i <= b; ++i) {
      const double frac = i == b ? 1.0 : (t[i] - t[a]) / (t[b] - t[a]);
      for (std::size_t q = 0; q < d; ++q)
        for (std::size_t r = 0; r < d; ++r)
          v[i * d * d + q * d + r] = v[a * d * d + q * d + r] + frac * inc[q] * inc[r];
    }
  }
  return BracketGrid(z.times(), z.dim(), std::move(v));
}

BracketGrid bracket_fine(const GridPath& z) { return bracket_pl(z, z.times()); }

RoughPathGrid pl_ito_lift(const GridPath& z, std::span<const double> partition) {
  const auto idx = partition_indices(z, partition);
  const auto d = static_cast<std::size_t>(z.dim());
  const auto& t = z.times();
  // Chord interpolation Z^D evaluated on the full grid.
  std::vector<double> zd(z.size() * d);
  for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
    const std::size_t a = idx[k], b = idx[k + 1];
    auto za = z.at(a);
    auto zb = z.at(b);
    for (std::size_t i = a; i <= b; ++i) {
      const double frac = (t[i] - t[a]) / (t[b] - t[a]);
      for (std::size_t q = 0; q < d; ++q) zd[i * d + q] = za[q] + frac * (zb[q] - za[q]);
    }
  }
  const GridPath chord(t, z.dim(), std::move(zd));
  return shift_level2(strat_lift(chord), bracket_pl(z, partition), -1);
}

RoughPathGrid shift_level2(const RoughPathGrid& gamma, const BracketGrid& q, int sign) {
  require(gamma.depth() == 2, "shift_level2: depth-2 path required");
  require(gamma.times() == q.times(), "shift_level2: grid mismatch");
  require(gamma.dim() == q.dim(), "shift_level2: dimension mismatch");
  require(sign == 1 || sign == -1, "shift_level2: sign must be +1 or -1");
  std::vector<TruncatedTensor> el = gamma.elements();
  for (std::size_t i = 0; i < el.size(); ++i) {
    auto a = el[i].level(2);
    auto qi = q.at(i);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += sign * 0.5 * qi[k];
  }
  return RoughPathGrid(gamma.times(), std::move(el));
}

PerturbedLift perturbed_lift(const RoughPathGrid& gamma, const GridPath& m) {
  require(gamma.depth() == 2, "perturbed_lift: depth-2 path required");
  require(gamma.times() == m.times(), "perturbed_lift: grid mismatch");
  require(gamma.dim() == m.dim(), "perturbed_lift: dimension mismatch");
  const int di = gamma.dim();
  const auto d = static_cast<std::size_t>(di);
  const std::size_t n = gamma.size();
  // Re-base γ at the identity and M at 0.
  const TruncatedTensor g0inv = inverse(gamma[0]);
  std::vector<TruncatedTensor> base;
  base.reserve(n);
  for (const auto& g : gamma.elements()) base.push_back(mul(g0inv, g));

  auto m0 = m.at(0);
  auto mm = [&](std::size_t i, std::size_t q) { return m.at(i)[q] - m0[q]; };
  auto xx = [&](std::size_t i, std::size_t q) { return base[i].level(1)[q]; };

  std::vector<double> cross(n * d * d, 0.0);
  std::vector<TruncatedTensor> combined;
  combined.reserve(n);
  combined.emplace_back(di, 2);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t q = 0; q < d; ++q) {
      const double xm = 0.5 * (xx(i, q) + xx(i + 1, q));
      const double mmid = 0.5 * (mm(i, q) + mm(i + 1, q));
      for (std::size_t r = 0; r < d; ++r) {
        const double dm = mm(i + 1, r) - mm(i, r);
        const double dx = xx(i + 1, r) - xx(i, r);
        const std::size_t idx = q * d + r;
        cross[(i + 1) * d * d + idx] = cross[i * d * d + idx] + xm * dm + mmid * dx;
      }
    }
  }
  const auto noise = strat_lift(m);
  for (std::size_t i = 1; i < n; ++i) {
    TruncatedTensor g(di, 2);
    auto l1 = g.level(1);
    auto l2 = g.level(2);
    for (std::size_t q = 0; q < d; ++q) l1[q] = xx(i, q) + mm(i, q);
    auto b2 = base[i].level(2);
    auto n2 = noise[i].level(2);
    for (std::size_t k = 0; k < d * d; ++k) l2[k] = b2[k] + n2[k] + cross[i * d * d + k];
    combined.push_back(std::move(g));
  }
  return PerturbedLift{RoughPathGrid(gamma.times(), std::move(base)), noise,
                       GridPath(gamma.times(), di * di, std::move(cross)),
                       RoughPathGrid(gamma.times(), std::move(combined))};
}

std::vector<double> psd_sqrt(std::span<const double> a, int d) {
  require(a.size() == static_cast<std::size_t>(d * d), "psd_sqrt: size mismatch");
  if (d == 1) return {std::sqrt(std::max(0.0, a[0]))};
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = 0.5 * (a[i * d + j] + a[j * d + i]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd r = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  std::vector<double> out(a.size());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out[i * d + j] = r(i, j);
  return out;
}

GridPath bracket_root_integrand(const BracketGrid& bracket) {
  const int d = bracket.dim();
  const auto w = static_cast<std::size_t>(d * d);
  const auto& t = bracket.times();
  require(t.size() >= 2, "bracket_root_integrand: need at least 2 grid points");
  std::vector<double> v(t.size() * w, 0.0);
  std::vector<double> rate(w);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    auto a = bracket.at(i);
    auto b = bracket.at(i + 1);
    const double dt = t[i + 1] - t[i];
    for (std::size_t k = 0; k < w; ++k) rate[k] = (b[k] - a[k]) / dt;
    const auto root = psd_sqrt(rate, d);
    std::copy(root.begin(), root.end(), v.begin() + static_cast<long>(i * w));
  }
  std::copy_n(v.begin() + static_cast<long>((t.size() - 2) * w), w,
              v.begin() + static_cast<long>((t.size() - 1) * w));
  return GridPath(t, d * d, std::move(v));
}

}  // namespace rp
