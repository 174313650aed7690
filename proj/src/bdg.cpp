#include "roughpath/bdg.hpp"

#include <algorithm>
#include <cmath>

#include "roughpath/error.hpp"
#include "roughpath/random.hpp"
#include "roughpath/signature.hpp"
#include "roughpath/stochastic.hpp"

namespace rp {

MartingaleGenerator brownian_generator(int d, std::size_t steps, double scale, std::uint64_t seed) {
  require(d >= 1 && steps >= 1, "brownian_generator: bad shape");
  return [=](std::uint64_t replica, double horizon) {
    RandomStream rng(seed, {replica});
    auto b = sample_brownian(uniform_grid(0.0, horizon, steps), d, rng);
    if (scale == 1.0) return b;
    std::vector<double> v = b.values();
    for (double& x : v) x *= scale;
    return GridPath(b.times(), d, std::move(v));
  };
}

double ito_signature_pvar(const GridPath& z, int n, double p) {
  require(n >= 1, "signature depth must be >= 1");
  if (n == 1) return p_variation(z, p);
  const auto lift = ito_lift(z);
  if (n == 2) return p_variation(lift, p);
  return p_variation(lyons_extend(lift, n), p);
}

namespace {

// Ratio of means with a delta-method standard error.
void ratio_of_means(std::span<const double> a, std::span<const double> b, double& r, double& se) {
  const auto ma = mean_se(a), mb = mean_se(b);
  r = ma.mean / mb.mean;
  std::vector<double> resid(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) resid[i] = a[i] - r * b[i];
  se = mean_se(resid).se / mb.mean;
}

}  // namespace

MomentReport bdg_ratio_check(const MartingaleGenerator& gen, const BdgConfig& cfg) {
  require(cfg.p > 2.0, "bdg: p must exceed 2");
  require(cfg.q > 0.0 && cfg.q <= 4.0, "bdg: q must lie in (0, 4]");
  require(cfg.n >= 1, "bdg: n must be >= 1");
  require(cfg.paths >= cfg.min_paths, "bdg: too few paths");
  require(cfg.horizon > 0.0, "bdg: horizon must be positive");
  const std::size_t N = cfg.paths;
  std::vector<double> sig(N), br(N), endp(N);
  parallel_for(N, [&](std::size_t i) {
    const auto z = gen(i, cfg.horizon);
    sig[i] = std::pow(ito_signature_pvar(z, cfg.n, cfg.p), cfg.q);
    const auto q = bracket_fine(z);
    double sup = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      double s = 0.0;
      for (double x : q.at(k)) s += x * x;
      sup = std::max(sup, std::sqrt(s));
    }
    br[i] = std::pow(sup, 0.5 * cfg.q);
    const auto inc = z.increment(0, z.size() - 1);
    double s = 0.0;
    for (double x : inc) s += x * x;
    endp[i] = std::pow(std::sqrt(s), cfg.q);
  });
  MomentReport rep;
  rep.p = cfg.p;
  rep.q = cfg.q;
  rep.n = cfg.n;
  rep.horizon = cfg.horizon;
  rep.paths = N;
  rep.signature_pvar = mean_se(sig);
  rep.bracket = mean_se(br);
  rep.endpoint = mean_se(endp);
  ratio_of_means(sig, br, rep.ratio, rep.ratio_se);
  ratio_of_means(endp, br, rep.endpoint_ratio, rep.endpoint_ratio_se);
  return rep;
}

}  // namespace rp
