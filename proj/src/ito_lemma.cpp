#include "roughpath/ito_lemma.hpp"

#include <algorithm>
#include <cmath>

#include "roughpath/error.hpp"
#include "roughpath/stochastic.hpp"

namespace rp {

GridPath young_integral(const GridPath& a, const GridPath& h) {
  require(a.times() == h.times(), "young_integral: grid mismatch");
  const auto da = static_cast<std::size_t>(a.dim());
  const auto dh = static_cast<std::size_t>(h.dim());
  const std::size_t w = da * dh;
  std::vector<double> out(a.size() * w, 0.0);
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    auto ak = a.at(k);
    auto h0 = h.at(k);
    auto h1 = h.at(k + 1);
    for (std::size_t i = 0; i < da; ++i)
      for (std::size_t j = 0; j < dh; ++j)
        out[(k + 1) * w + i * dh + j] = out[k * w + i * dh + j] + ak[i] * (h1[j] - h0[j]);
  }
  return GridPath(a.times(), static_cast<int>(w), std::move(out));
}

GridPath apply_map(const SmoothMap& f, const GridPath& z) {
  require(z.dim() == f.d, "apply_map: dimension mismatch");
  const auto e = static_cast<std::size_t>(f.e);
  std::vector<double> out(z.size() * e);
  for (std::size_t k = 0; k < z.size(); ++k)
    f.value(z.at(k), std::span<double>(out.data() + k * e, e));
  return GridPath(z.times(), f.e, std::move(out));
}

HPath build_h_path(const SmoothMap& f, const GridPath& z, const BracketGrid& bracket) {
  if (!f.hessian) throw Unsupported("map '" + f.name + "' has no second derivative");
  require(z.dim() == f.d, "build_h_path: dimension mismatch");
  require(bracket.times() == z.times() && bracket.dim() == z.dim(), "build_h_path: bracket mismatch");
  const auto d = static_cast<std::size_t>(f.d);
  const auto e = static_cast<std::size_t>(f.e);
  const std::size_t n = z.size();
  std::vector<double> x1(n * e, 0.0), x2(n * e * e, 0.0), jac(e * d), hes(e * d * d), dq(d * d);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    auto q0 = bracket.at(k);
    auto q1 = bracket.at(k + 1);
    for (std::size_t r = 0; r < d * d; ++r) dq[r] = q1[r] - q0[r];
    f.jacobian(z.at(k), jac);
    f.hessian(z.at(k), hes);
    for (std::size_t i = 0; i < e; ++i) {
      double s = 0.0;
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) s += hes[(i * d + a) * d + b] * dq[a * d + b];
      x1[(k + 1) * e + i] = x1[k * e + i] + 0.5 * s;
    }
    for (std::size_t i = 0; i < e; ++i)
      for (std::size_t j = 0; j < e; ++j) {
        double s = 0.0;
        for (std::size_t a = 0; a < d; ++a)
          for (std::size_t b = 0; b < d; ++b) s += jac[i * d + a] * jac[j * d + b] * dq[a * d + b];
        x2[(k + 1) * e * e + i * e + j] = x2[k * e * e + i * e + j] + 0.5 * s;
      }
  }
  GridPath p1(z.times(), f.e, std::move(x1));
  GridPath p2(z.times(), f.e * f.e, std::move(x2));
  const auto area = young_integral(p1, p1);
  std::vector<TruncatedTensor> el;
  el.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    TruncatedTensor g(f.e, 2);
    std::copy_n(p1.at(k).begin(), e, g.level(1).begin());
    auto l2 = g.level(2);
    for (std::size_t r = 0; r < e * e; ++r) l2[r] = area.at(k)[r] + p2.at(k)[r];
    el.push_back(std::move(g));
  }
  return HPath{std::move(p1), std::move(p2), RoughPathGrid(z.times(), std::move(el))};
}

ItoLemmaTerms ito_lemma_terms(const SmoothMap& f, const GridPath& z,
                              const std::optional<BracketGrid>& bracket, const RdeOptions& opts) {
  require(z.size() >= 2, "ito lemma: need at least 2 grid points");
  const BracketGrid q = bracket ? *bracket : bracket_fine(z);
  auto lhs = strat_lift(apply_map(f, z));
  auto integral = rough_integral_one_form(f.derivative_form(), ito_lift(z), opts);
  auto h = build_h_path(f, z, q);

  const auto e = static_cast<std::size_t>(f.e);
  const GridPath i1 = integral.first_level();
  const auto cross_ih = young_integral(i1, h.x1);
  const auto cross_hi = young_integral(h.x1, i1);
  std::vector<TruncatedTensor> el;
  el.reserve(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    TruncatedTensor g(f.e, 2);
    auto l1 = g.level(1);
    auto l2 = g.level(2);
    auto a1 = integral[k].level(1);
    auto a2 = integral[k].level(2);
    auto h1 = h.h[k].level(1);
    auto h2 = h.h[k].level(2);
    for (std::size_t i = 0; i < e; ++i) l1[i] = a1[i] + h1[i];
    for (std::size_t r = 0; r < e * e; ++r)
      l2[r] = a2[r] + h2[r] + cross_ih.at(k)[r] + cross_hi.at(k)[r];
    el.push_back(std::move(g));
  }
  return ItoLemmaTerms{std::move(lhs), std::move(integral), std::move(h),
                       RoughPathGrid(z.times(), std::move(el))};
}

ItoLemmaReport verify_ito_lemma(const SmoothMap& f, const GridPath& z,
                                const std::optional<BracketGrid>& bracket, const RdeOptions& opts) {
  const auto terms = ito_lemma_terms(f, z, bracket, opts);
  ItoLemmaReport rep;
  const auto& t = z.times();
  for (std::size_t k = 0; k + 1 < t.size(); ++k) rep.mesh = std::max(rep.mesh, t[k + 1] - t[k]);
  for (std::size_t k = 0; k < z.size(); ++k) {
    for (int lv = 1; lv <= 2; ++lv) {
      auto a = terms.lhs[k].level(lv);
      auto b = terms.rhs[k].level(lv);
      double s = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
      double& r = lv == 1 ? rep.level1 : rep.level2;
      r = std::max(r, std::sqrt(s));
    }
  }
  return rep;
}

}  // namespace rp
