#include "roughpath/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "roughpath/error.hpp"
#include "roughpath/parallel.hpp"
#include "roughpath/random.hpp"
#include "roughpath/signature.hpp"

namespace rp {

namespace {

std::vector<std::size_t> partition_indices(const std::vector<double>& grid,
                                           std::span<const double> partition) {
  std::vector<std::size_t> idx;
  require(partition.size() >= 2, "partition needs at least two points");
  require(locate_subgrid(grid, partition, idx), "partition is not a sub-grid of the driver's grid");
  require(idx.front() == 0 && idx.back() + 1 == grid.size(),
          "partition must contain both endpoints of the driver's grid");
  return idx;
}

// Level-2 increment accumulator for ‖driver increment‖ diagnostics.
struct Depth2Acc {
  std::size_t d;
  std::vector<double> x, a;
  explicit Depth2Acc(std::size_t dim) : d(dim), x(dim, 0.0), a(dim * dim, 0.0) {}
  void push(std::span<const double> v, std::span<const double> step2) {
    for (std::size_t q = 0; q < d; ++q)
      for (std::size_t r = 0; r < d; ++r) a[q * d + r] += x[q] * v[r] + step2[q * d + r];
    for (std::size_t q = 0; q < d; ++q) x[q] += v[q];
  }
  double norm() const {
    double s1 = 0.0, s2 = 0.0;
    for (double u : x) s1 += u * u;
    for (double u : a) s2 += u * u;
    return std::sqrt(s1) + std::pow(s2, 0.25);
  }
};

}  // namespace

void SchemeConfig::validate(const RoughPathGrid& gamma, const VectorField& vf,
                            const TruncatedTensor& xi) const {
  require(gamma.depth() == 2, "scheme: driver must be a depth-2 rough path");
  require(gamma.dim() == vf.d, "scheme: driver dimension does not match the vector field");
  require(xi.dim() == vf.e, "scheme: initial value must live in T^(n)(R^e)");
  require(depth >= 1 && xi.depth() == depth, "scheme: depth must match the initial value");
  partition_indices(gamma.times(), partition);
  require(noise.phi.times() == gamma.times(), "scheme: noise integrand must live on the driver's grid");
  require(noise.dim() == gamma.dim(), "scheme: noise dimension must match the driver");
  require(mc_samples >= 1, "scheme: mc_samples must be >= 1");
  require(moment_p > 0.0, "scheme: moment_p must be positive");
  if (expectation_mode == ExpectationMode::monte_carlo) {
    require(mc_samples >= min_mc_samples,
            "scheme: mc_samples below the configured floor (" + std::to_string(min_mc_samples) + ")");
  } else {
    double c = 0.0;
    require(scalar_linear_coefficient(vf, c), "scheme: closed-form mode needs a scalar linear field");
  }
}

const TruncatedTensor& SchemeOutput::at_time(double t) const {
  require(!values.empty() && values.size() == partition.size(), "scheme output is empty");
  if (t <= partition.front()) return values.front();
  const auto it = std::lower_bound(partition.begin(), partition.end(), t);
  require(it != partition.end(), "time beyond the partition");
  return values[static_cast<std::size_t>(it - partition.begin())];
}

RoughPathGrid ito_rough_driver(const RoughPathGrid& gamma, const BracketGrid& bracket_m) {
  return shift_level2(gamma, bracket_m, -1);
}

IncrementPair strat_increment_pair(std::size_t first, std::size_t last,
                                   const TruncatedTensor& state, const RoughPathGrid& gamma,
                                   const VectorField& vf, const GridPath& m,
                                   const RdeOptions& opts) {
  require(first < last && last < gamma.size(), "strat_increment_pair: bad step range");
  require(m.times() == gamma.times(), "strat_increment_pair: noise grid mismatch");
  std::vector<std::size_t> idx(last - first + 1);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = first + i;
  const auto g = restrict_to(gamma, idx);
  const auto mi = restrict_to(m, idx);
  const auto pert = perturbed_lift(g, mi);
  const int n = state.depth();
  return {solution_increment(g, vf, state.level(1), n, opts),
          solution_increment(pert.combined, vf, state.level(1), n, opts)};
}

ExpectedIncrement expected_increment(std::span<const TruncatedTensor> samples) {
  require(!samples.empty(), "expected_increment: no samples");
  const auto& s0 = samples.front();
  const std::size_t nc = s0.coefficients().size();
  const std::size_t ns = samples.size();
  std::vector<double> column(ns);
  ExpectedIncrement out{TruncatedTensor(s0.dim(), s0.depth()), std::vector<double>(nc, 0.0),
                        TruncatedTensor(s0.dim(), s0.depth())};
  auto mean = out.mean.coefficients();
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t r = 0; r < ns; ++r) {
      require(samples[r].same_shape(s0), "expected_increment: replicas differ in shape");
      const double x = samples[r].coefficients()[c];
      if (!std::isfinite(x)) throw Diverged("non-finite Monte Carlo replica", 0.0);
      column[r] = x;
    }
    const auto ms = mean_se(column);
    mean[c] = ms.mean;
    out.se[c] = ms.se;
  }
  out.inverse = inverse(out.mean);
  return out;
}

TruncatedTensor expected_increment_inverse(std::span<const TruncatedTensor> samples) {
  return expected_increment(samples).inverse;
}

bool scalar_linear_coefficient(const VectorField& vf, double& c) {
  if (vf.d != 1 || vf.e != 1 || !vf.f) return false;
  double out = 0.0;
  const double y0 = 0.0;
  vf.f(std::span<const double>(&y0, 1), std::span<double>(&out, 1));
  if (out != 0.0) return false;
  const double y1 = 1.0;
  vf.f(std::span<const double>(&y1, 1), std::span<double>(&out, 1));
  c = out;
  for (double y : {-3.0, -0.5, 0.25, 2.0, 7.0}) {
    vf.f(std::span<const double>(&y, 1), std::span<double>(&out, 1));
    if (std::abs(out - c * y) > 1e-12 * std::max(1.0, std::abs(c * y))) return false;
  }
  return true;
}

TruncatedTensor closed_form_linear_expectation(const DriverSteps& steps, std::size_t first,
                                               std::size_t last, double c, double y0,
                                               const GridPath& phi, int n) {
  require(steps.dim == 1 && phi.dim() == 1, "closed form needs d = e = 1");
  require(first < last && last <= steps.steps(), "closed form: bad step range");
  double x = 0.0, a = 0.0, var = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    const double v = steps.v(k)[0];
    a += x * v + steps.a(k)[0];
    x += v;
    const double p = phi.at(k)[0];
    var += p * p * (steps.times[k + 1] - steps.times[k]);
  }
  const double drift = a - 0.5 * x * x;
  require(n == 1 || std::abs(drift) <= 1e-12 * std::max(1.0, x * x),
          "closed form at depth >= 2 needs a geometric driver");
  // E[(y0 (e^{c(x+M) + c²δ} - 1))^k] by the binomial expansion and
  // E e^{i c M} = e^{i² c² var / 2}.
  TruncatedTensor out(1, n);
  double fact = 1.0, ypow = 1.0;
  for (int k = 1; k <= n; ++k) {
    fact *= k;
    ypow *= y0;
    double s = 0.0, binom = 1.0;
    for (int i = 0; i <= k; ++i) {
      if (i > 0) binom = binom * (k - i + 1) / i;
      const double sign = ((k - i) % 2 == 0) ? 1.0 : -1.0;
      s += sign * binom * std::exp(i * (c * x + c * c * drift) + 0.5 * i * i * c * c * var);
    }
    out.level(k)[0] = ypow * s / fact;
  }
  return out;
}

SchemeOutput concat_discounted(const RoughPathGrid& gamma, const VectorField& vf,
                               const TruncatedTensor& xi, const SchemeConfig& cfg) {
  cfg.validate(gamma, vf, xi);
  const auto idx = partition_indices(gamma.times(), cfg.partition);
  const auto steps = DriverSteps::from(gamma);
  const int n = cfg.depth;
  const auto d = static_cast<std::size_t>(gamma.dim());
  const bool closed = cfg.expectation_mode == ExpectationMode::closed_form_linear;
  double lin_c = 0.0;
  if (closed) scalar_linear_coefficient(vf, lin_c);

  SchemeOutput out;
  out.partition = cfg.partition;
  out.values.reserve(idx.size());
  out.values.push_back(xi);
  TruncatedTensor state = xi;

  for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
    const std::size_t first = idx[j], last = idx[j + 1];
    const std::size_t len = last - first;
    const std::vector<double> y0(state.level(1).begin(), state.level(1).end());
    IntervalDiagnostics diag;
    diag.t0 = gamma.times()[first];
    diag.t1 = gamma.times()[last];
    try {
      const auto y1 = solution_increment(steps, first, last, vf, y0, n, cfg.rde);
      TruncatedTensor e_inv(vf.e, n);
      if (closed) {
        e_inv = inverse(
            closed_form_linear_expectation(steps, first, last, lin_c, y0[0], cfg.noise.phi, n));
        diag.mean_se.assign(e_inv.coefficients().size(), 0.0);
      } else {
        const std::size_t N = cfg.mc_samples;
        std::vector<TruncatedTensor> samples(N, TruncatedTensor(vf.e, n));
        std::vector<double> moments(N);
        parallel_for(N, [&](std::size_t r) {
          DriverSteps local;
          local.dim = steps.dim;
          local.times.assign(steps.times.begin() + static_cast<long>(first),
                             steps.times.begin() + static_cast<long>(last + 1));
          local.level1.resize(len * d);
          local.level2.resize(len * d * d);
          std::vector<double> w(d), z(d);
          Depth2Acc acc(d);
          for (std::size_t k = 0; k < len; ++k) {
            const std::size_t g = first + k;
            const double sd = std::sqrt(steps.times[g + 1] - steps.times[g]);
            auto p = cfg.noise.phi.at(g);
            replica_step_normals(cfg.noise.seed, r, g, z);
            std::fill(w.begin(), w.end(), 0.0);
            for (std::size_t c = 0; c < d; ++c)
              for (std::size_t q = 0; q < d; ++q) w[q] += p[q * d + c] * sd * z[c];
            auto u = steps.v(g);
            auto a = steps.a(g);
            double* v1 = local.level1.data() + k * d;
            double* v2 = local.level2.data() + k * d * d;
            for (std::size_t q = 0; q < d; ++q) v1[q] = u[q] + w[q];
            for (std::size_t q = 0; q < d; ++q)
              for (std::size_t s = 0; s < d; ++s)
                v2[q * d + s] = a[q * d + s] + 0.5 * w[q] * w[s] + 0.5 * (u[q] * w[s] + w[q] * u[s]);
            acc.push(local.v(k), local.a(k));
          }
          moments[r] = std::pow(acc.norm(), n * cfg.moment_p);
          samples[r] = solution_increment(local, 0, len, vf, y0, n, cfg.rde);
        });
        auto ei = expected_increment(samples);
        e_inv = std::move(ei.inverse);
        diag.mean_se = std::move(ei.se);
        diag.driver_moment = mean_se(moments).mean;
      }
      diag.max_se = diag.mean_se.empty() ? 0.0 : *std::max_element(diag.mean_se.begin(), diag.mean_se.end());
      state = mul(mul(mul(state, y1), e_inv), y1);
    } catch (const Diverged& e) {
      throw Diverged(std::string(e.what()) + " (interval " + std::to_string(j) + ")", e.time(),
                     static_cast<long>(j));
    }
    for (double x : state.coefficients())
      if (!std::isfinite(x) || std::abs(x) > cfg.rde.blowup)
        throw Diverged("scheme state diverged (interval " + std::to_string(j) + ")", diag.t1,
                       static_cast<long>(j));
    out.values.push_back(state);
    out.diagnostics.push_back(std::move(diag));
  }
  return out;
}

NoiseSpec ztilde_noise(const GridPath& z, std::uint64_t seed, std::size_t paths) {
  return NoiseSpec{bracket_root_integrand(bracket_fine(z)), seed, paths};
}

SignaturePath ito_reference(const RoughPathGrid& gamma, const BracketGrid& bracket_m,
                            const VectorField& vf, const TruncatedTensor& xi,
                            const RdeOptions& opts) {
  return rde_solve(ito_rough_driver(gamma, bracket_m), vf, xi, opts).group;
}

std::vector<ConvergenceRow> convergence_study(const RoughPathGrid& gamma, const VectorField& vf,
                                              const TruncatedTensor& xi, const SchemeConfig& base,
                                              std::span<const int> levels,
                                              const SignaturePath& reference) {
  require(reference.times() == gamma.times(), "convergence_study: reference grid mismatch");
  require(reference.depth() == xi.depth() && reference.dim() == xi.dim(),
          "convergence_study: reference shape mismatch");
  std::vector<ConvergenceRow> rows;
  const int n = xi.depth();
  for (int m : levels) {
    const auto idx = dyadic_indices(gamma.steps(), m);
    SchemeConfig cfg = base;
    cfg.partition.clear();
    for (auto i : idx) cfg.partition.push_back(gamma.times()[i]);
    const auto res = concat_discounted(gamma, vf, xi, cfg);
    ConvergenceRow row;
    row.m = m;
    row.intervals = idx.size() - 1;
    row.level_error.assign(static_cast<std::size_t>(n), 0.0);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const auto& y = res.values[j];
      const auto& ref = reference[idx[j]];
      for (int k = 1; k <= n; ++k) {
        auto a = y.level(k);
        auto b = ref.level(k);
        double s = 0.0;
        for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
        auto& e = row.level_error[static_cast<std::size_t>(k - 1)];
        e = std::max(e, std::sqrt(s));
      }
    }
    row.error = *std::max_element(row.level_error.begin(), row.level_error.end());
    for (const auto& dg : res.diagnostics) row.max_se = std::max(row.max_se, dg.max_se);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rp
