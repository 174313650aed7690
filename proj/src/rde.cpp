#include "roughpath/rde.hpp"

#include <algorithm>
#include <cmath>

#include "roughpath/error.hpp"
#include "roughpath/signature.hpp"

namespace rp {

DriverSteps DriverSteps::from(const RoughPathGrid& gamma) {
  require(gamma.depth() == 2, "driver must be a depth-2 rough path");
  require(gamma.size() >= 2, "driver needs at least 2 grid points");
  DriverSteps s;
  s.dim = gamma.dim();
  s.times = gamma.times();
  const auto d = static_cast<std::size_t>(s.dim);
  s.level1.resize(s.steps() * d);
  s.level2.resize(s.steps() * d * d);
  for (std::size_t k = 0; k < s.steps(); ++k) {
    auto x0 = gamma[k].level(1), x1 = gamma[k + 1].level(1);
    auto a0 = gamma[k].level(2), a1 = gamma[k + 1].level(2);
    for (std::size_t q = 0; q < d; ++q) s.level1[k * d + q] = x1[q] - x0[q];
    for (std::size_t q = 0; q < d; ++q)
      for (std::size_t r = 0; r < d; ++r)
        s.level2[k * d * d + q * d + r] = a1[q * d + r] - a0[q * d + r] - x0[q] * (x1[r] - x0[r]);
  }
  return s;
}

namespace {

class Stepper {
 public:
  Stepper(const VectorField& vf, const RdeOptions& opts)
      : vf_(vf), opts_(opts), d_(static_cast<std::size_t>(vf.d)), e_(static_cast<std::size_t>(vf.e)),
        fy_(e_ * d_), dfy_(e_ * d_ * e_), log2_(d_ * d_), dy_(e_), k_(4, std::vector<double>(e_)),
        ytmp_(e_) {
    require(static_cast<bool>(vf.f), "vector field has no evaluator");
    require(opts.ode_substeps >= 1, "ode_substeps must be >= 1");
  }

  /// Advances y over one driver step (v, a). Afterwards f_start() holds f at
  /// the pre-step state and increment() holds Δy.
  void step(std::span<double> y, std::span<const double> v, std::span<const double> a) {
    vf_.f(y, fy_);
    for (std::size_t q = 0; q < d_; ++q)
      for (std::size_t r = 0; r < d_; ++r) log2_[q * d_ + r] = a[q * d_ + r] - 0.5 * v[q] * v[r];

    if (opts_.scheme == StepScheme::increment_euler) {
      std::fill(dy_.begin(), dy_.end(), 0.0);
      add_fv(fy_, v, dy_);
      if (needs_second_order(a)) {
        if (!vf_.df) throw Unsupported("vector field '" + vf_.name + "' has no derivative");
        vf_.df(y, dfy_);
        apply_dff(vf_.d, vf_.e, fy_, dfy_, a, dy_);
      }
      for (std::size_t i = 0; i < e_; ++i) y[i] += dy_[i];
      return;
    }

    // ode_approx: chord flow f(y) v generates ½ v⊗v; the rest of π₂ enters as
    // a Dff forcing term.
    const std::vector<double> y0(y.begin(), y.end());
    const double h = 1.0 / opts_.ode_substeps;
    std::vector<double> cur = y0;
    for (int s = 0; s < opts_.ode_substeps; ++s) {
      rhs(cur, v, k_[0]);
      for (std::size_t i = 0; i < e_; ++i) ytmp_[i] = cur[i] + 0.5 * h * k_[0][i];
      rhs(ytmp_, v, k_[1]);
      for (std::size_t i = 0; i < e_; ++i) ytmp_[i] = cur[i] + 0.5 * h * k_[1][i];
      rhs(ytmp_, v, k_[2]);
      for (std::size_t i = 0; i < e_; ++i) ytmp_[i] = cur[i] + h * k_[2][i];
      rhs(ytmp_, v, k_[3]);
      for (std::size_t i = 0; i < e_; ++i)
        cur[i] += h / 6.0 * (k_[0][i] + 2.0 * k_[1][i] + 2.0 * k_[2][i] + k_[3][i]);
    }
    vf_.f(y0, fy_);  // restore f at the pre-step state
    for (std::size_t i = 0; i < e_; ++i) {
      dy_[i] = cur[i] - y0[i];
      y[i] = cur[i];
    }
  }

  std::span<const double> f_start() const { return fy_; }
  std::span<const double> increment() const { return dy_; }
  std::span<const double> log2_level2() const { return log2_; }

 private:
  void add_fv(std::span<const double> fy, std::span<const double> v, std::span<double> out) const {
    for (std::size_t i = 0; i < e_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d_; ++j) s += fy[i * d_ + j] * v[j];
      out[i] += s;
    }
  }

  bool needs_second_order(std::span<const double> a) const {
    return std::any_of(a.begin(), a.end(), [](double x) { return x != 0.0; });
  }

  void rhs(std::span<const double> y, std::span<const double> v, std::vector<double>& out) {
    std::vector<double> fy(e_ * d_);
    vf_.f(y, fy);
    std::fill(out.begin(), out.end(), 0.0);
    add_fv(fy, v, out);
    if (needs_second_order(log2_)) {
      if (!vf_.df) throw Unsupported("vector field '" + vf_.name + "' has no derivative");
      vf_.df(y, dfy_);
      apply_dff(vf_.d, vf_.e, fy, dfy_, log2_, out);
    }
  }

  const VectorField& vf_;
  RdeOptions opts_;
  std::size_t d_, e_;
  std::vector<double> fy_, dfy_, log2_, dy_;
  std::vector<std::vector<double>> k_;
  std::vector<double> ytmp_;
};

void guard(std::span<const double> y, double blowup, double t, long interval = -1) {
  for (double x : y) {
    if (!std::isfinite(x) || std::abs(x) > blowup)
      throw Diverged("solution diverged at t = " + std::to_string(t), t, interval);
  }
}

// (f ⊗ f)[L] = f L fᵀ, e×e.
void push_forward_level2(std::span<const double> fy, std::span<const double> L, std::size_t d,
                         std::size_t e, std::span<double> out) {
  for (std::size_t p = 0; p < e; ++p)
    for (std::size_t q = 0; q < e; ++q) {
      double s = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double fpa = fy[p * d + a];
        if (fpa == 0.0) continue;
        for (std::size_t b = 0; b < d; ++b) s += fpa * L[a * d + b] * fy[q * d + b];
      }
      out[p * e + q] = s;
    }
}

// Accumulates Π_k exp(Δy_k + M_k) at depth n.
class GroupAccumulator {
 public:
  GroupAccumulator(int e, int n) : e_(static_cast<std::size_t>(e)), n_(n), acc_(e, n), next_(e, n) {}

  void push(std::span<const double> dy, std::span<const double> m) {
    if (n_ <= 2) {
      auto s1 = acc_.level(1);
      if (n_ == 2) {
        auto s2 = acc_.level(2);
        for (std::size_t p = 0; p < e_; ++p)
          for (std::size_t q = 0; q < e_; ++q)
            s2[p * e_ + q] += s1[p] * dy[q] + 0.5 * dy[p] * dy[q] + m[p * e_ + q];
      }
      for (std::size_t p = 0; p < e_; ++p) s1[p] += dy[p];
      return;
    }
    const auto step = exp_levels12(dy, m, static_cast<int>(e_), n_);
    mul_into(next_, acc_, step);
    std::swap(acc_, next_);
  }

  const TruncatedTensor& value() const { return acc_; }

 private:
  std::size_t e_;
  int n_;
  TruncatedTensor acc_, next_;
};

}  // namespace

GridPath solve_first_level(const RoughPathGrid& gamma, const VectorField& vf,
                           std::span<const double> y0, const RdeOptions& opts) {
  require(gamma.dim() == vf.d, "rde: driver dimension does not match the vector field");
  require(y0.size() == static_cast<std::size_t>(vf.e), "rde: initial value dimension mismatch");
  const auto steps = DriverSteps::from(gamma);
  Stepper stepper(vf, opts);
  const auto e = static_cast<std::size_t>(vf.e);
  std::vector<double> out(gamma.size() * e);
  std::copy(y0.begin(), y0.end(), out.begin());
  std::vector<double> y(y0.begin(), y0.end());
  for (std::size_t k = 0; k < steps.steps(); ++k) {
    stepper.step(y, steps.v(k), steps.a(k));
    guard(y, opts.blowup, steps.times[k + 1]);
    std::copy(y.begin(), y.end(), out.begin() + static_cast<long>((k + 1) * e));
  }
  return GridPath(gamma.times(), vf.e, std::move(out));
}

SignaturePath enhance_solution(const GridPath& first_level, const RoughPathGrid& gamma,
                               const VectorField& vf, const TruncatedTensor& xi) {
  require(first_level.times() == gamma.times(), "enhance_solution: grid mismatch");
  require(first_level.dim() == vf.e && xi.dim() == vf.e, "enhance_solution: dimension mismatch");
  require(gamma.dim() == vf.d, "enhance_solution: driver dimension mismatch");
  const auto steps = DriverSteps::from(gamma);
  const auto d = static_cast<std::size_t>(vf.d);
  const auto e = static_cast<std::size_t>(vf.e);
  const int n = xi.depth();
  std::vector<double> fy(e * d), L(d * d), m(e * e);
  std::vector<TruncatedTensor> el;
  el.reserve(gamma.size());
  GroupAccumulator acc(vf.e, n);
  el.push_back(xi);
  for (std::size_t k = 0; k < steps.steps(); ++k) {
    vf.f(first_level.at(k), fy);
    auto v = steps.v(k);
    auto a = steps.a(k);
    for (std::size_t q = 0; q < d; ++q)
      for (std::size_t r = 0; r < d; ++r) L[q * d + r] = a[q * d + r] - 0.5 * v[q] * v[r];
    push_forward_level2(fy, L, d, e, m);
    const auto dy = first_level.increment(k, k + 1);
    acc.push(dy, m);
    el.push_back(mul(xi, acc.value()));
  }
  return SignaturePath(gamma.times(), std::move(el));
}

RdeSolution rde_solve(const RoughPathGrid& gamma, const VectorField& vf, const TruncatedTensor& xi,
                      const RdeOptions& opts) {
  require(xi.dim() == vf.e, "rde: initial value must live in T^(n)(R^e)");
  auto y = solve_first_level(gamma, vf, xi.level(1), opts);
  auto group = enhance_solution(y, gamma, vf, xi);
  return RdeSolution{std::move(y), std::move(group)};
}

TruncatedTensor solution_increment(const DriverSteps& steps, std::size_t first, std::size_t last,
                                   const VectorField& vf, std::span<const double> y0, int n,
                                   const RdeOptions& opts, std::vector<double>* y_end) {
  require(steps.dim == vf.d, "rde: driver dimension does not match the vector field");
  require(y0.size() == static_cast<std::size_t>(vf.e), "rde: initial value dimension mismatch");
  require(first <= last && last <= steps.steps(), "rde: step range out of bounds");
  const auto d = static_cast<std::size_t>(vf.d);
  const auto e = static_cast<std::size_t>(vf.e);
  Stepper stepper(vf, opts);
  GroupAccumulator acc(vf.e, n);
  std::vector<double> y(y0.begin(), y0.end()), m(e * e);
  for (std::size_t k = first; k < last; ++k) {
    stepper.step(y, steps.v(k), steps.a(k));
    guard(y, opts.blowup, steps.times[k + 1]);
    push_forward_level2(stepper.f_start(), stepper.log2_level2(), d, e, m);
    acc.push(stepper.increment(), m);
  }
  if (y_end) *y_end = std::move(y);
  return acc.value();
}

TruncatedTensor solution_increment(const RoughPathGrid& gamma, const VectorField& vf,
                                   std::span<const double> y0, int n, const RdeOptions& opts) {
  const auto steps = DriverSteps::from(gamma);
  return solution_increment(steps, 0, steps.steps(), vf, y0, n, opts);
}

GridPath sde_euler_maruyama(const GridPath& z, const VectorField& vf, std::span<const double> y0,
                            double blowup) {
  require(z.dim() == vf.d, "sde: driver dimension does not match the vector field");
  require(y0.size() == static_cast<std::size_t>(vf.e), "sde: initial value dimension mismatch");
  const auto d = static_cast<std::size_t>(vf.d);
  const auto e = static_cast<std::size_t>(vf.e);
  std::vector<double> out(z.size() * e), fy(e * d), y(y0.begin(), y0.end());
  std::copy(y0.begin(), y0.end(), out.begin());
  for (std::size_t k = 0; k + 1 < z.size(); ++k) {
    vf.f(y, fy);
    auto a = z.at(k), b = z.at(k + 1);
    for (std::size_t i = 0; i < e; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += fy[i * d + j] * (b[j] - a[j]);
      y[i] += s;
    }
    guard(y, blowup, z.times()[k + 1]);
    std::copy(y.begin(), y.end(), out.begin() + static_cast<long>((k + 1) * e));
  }
  return GridPath(z.times(), vf.e, std::move(out));
}

RoughPathGrid rough_integral_one_form(const OneForm& g, const RoughPathGrid& gamma,
                                      const RdeOptions& opts) {
  require(gamma.dim() == g.d, "rough integral: driver dimension does not match the one-form");
  require(static_cast<bool>(g.g), "rough integral: one-form has no evaluator");
  const int d = g.d, e = g.e;
  const auto du = static_cast<std::size_t>(d);
  const auto eu = static_cast<std::size_t>(e);
  const auto total = du + eu;
  // F(x, I) = [Id_d; g(x)] ∈ L(R^d, R^{d+e}).
  VectorField ext;
  ext.name = "extended(" + g.name + ")";
  ext.d = d;
  ext.e = d + e;
  ext.f = [=](std::span<const double> s, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < du; ++i) out[i * du + i] = 1.0;
    g.g(s.first(du), out.subspan(du * du, eu * du));
  };
  if (g.dg) {
    ext.df = [=](std::span<const double> s, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      std::vector<double> dg(eu * du * du);
      g.dg(s.first(du), dg);
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t j = 0; j < du; ++j)
          for (std::size_t k = 0; k < du; ++k)
            out[((du + i) * du + j) * total + k] = dg[(i * du + j) * du + k];
    };
  }
  TruncatedTensor xi(d + e, 2);
  auto x0 = gamma[0].level(1);
  std::copy(x0.begin(), x0.end(), xi.level(1).begin());
  const auto sol = rde_solve(gamma, ext, xi, opts);

  std::vector<TruncatedTensor> el;
  el.reserve(gamma.size());
  for (const auto& big : sol.group.elements()) {
    TruncatedTensor small(e, 2);
    auto b1 = big.level(1);
    auto b2 = big.level(2);
    auto s1 = small.level(1);
    auto s2 = small.level(2);
    for (std::size_t i = 0; i < eu; ++i) s1[i] = b1[du + i];
    for (std::size_t i = 0; i < eu; ++i)
      for (std::size_t j = 0; j < eu; ++j) s2[i * eu + j] = b2[(du + i) * total + du + j];
    el.push_back(std::move(small));
  }
  return RoughPathGrid(gamma.times(), std::move(el));
}

}  // namespace rp
