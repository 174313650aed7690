#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "roughpath/averaging.hpp"
#include "roughpath/parallel.hpp"
#include "roughpath/signature.hpp"
#include "roughpath/stochastic.hpp"

using namespace rp;

TEST_CASE("random streams are keyed, not sequential") {
  RandomStream a(5, {1, 2}), b(5, {1, 2}), c(5, {2, 1});
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
}

TEST_CASE("Brownian increments have the right variance") {
  const auto t = uniform_grid(0.0, 2.0, 4000);
  const auto b = sample_brownian(t, 2, 99);
  double qv = 0.0;
  for (std::size_t k = 0; k + 1 < b.size(); ++k)
    for (double v : b.increment(k, k + 1)) qv += v * v;
  CHECK(qv / 2.0 == Catch::Approx(2.0).epsilon(0.1));
  CHECK(b.at(0)[0] == 0.0);
}

TEST_CASE("Ito and Stratonovich lifts differ by half the bracket") {
  const auto t = uniform_grid(0.0, 1.0, 200);
  const auto z = sample_brownian(t, 2, 7);
  const auto ito = ito_lift(z), strat = strat_lift(z);
  const auto q = bracket_fine(z);
  for (std::size_t i = 0; i < z.size(); i += 37)
    for (std::size_t r = 0; r < 4; ++r)
      CHECK(strat[i].level(2)[r] - ito[i].level(2)[r] == Catch::Approx(0.5 * q.at(i)[r]).margin(1e-12));
  const auto shifted = shift_level2(strat, q, -1);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(max_abs_diff(shifted[i], ito[i]) < 1e-12);
}

TEST_CASE("antisymmetric part of the Ito lift is the Levy area") {
  const auto t = uniform_grid(0.0, 1.0, 100);
  const auto z = sample_brownian(t, 2, 8);
  const auto ito = ito_lift(z), strat = strat_lift(z);
  const auto a = anti_part(ito[100].level(2), 2), b = anti_part(strat[100].level(2), 2);
  CHECK(a[1] == Catch::Approx(b[1]).margin(1e-13));
}

TEST_CASE("piecewise-linear Ito lift on the full grid is the Ito lift") {
  const auto t = uniform_grid(0.0, 1.0, 64);
  const auto z = sample_brownian(t, 2, 9);
  const auto pl = pl_ito_lift(z, t);
  const auto ito = ito_lift(z);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(max_abs_diff(pl[i], ito[i]) < 1e-12);
}

TEST_CASE("chord bracket agrees with the realised bracket at partition points") {
  const auto t = uniform_grid(0.0, 1.0, 64);
  const auto z = sample_brownian(t, 1, 10);
  std::vector<double> part;
  for (auto k : dyadic_indices(64, 3)) part.push_back(t[k]);
  const auto q = bracket_pl(z, part);
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < part.size(); ++j) {
    const double dz = z.at((j + 1) * 8)[0] - z.at(j * 8)[0];
    acc += dz * dz;
    CHECK(q.at((j + 1) * 8)[0] == Catch::Approx(acc).margin(1e-14));
  }
}

TEST_CASE("psd_sqrt squares back and clips round-off negatives") {
  const std::vector<double> a{4.0, 1.0, 1.0, 3.0};
  const auto r = psd_sqrt(a, 2);
  CHECK(r[0] * r[0] + r[1] * r[2] == Catch::Approx(4.0));
  CHECK(r[0] * r[1] + r[1] * r[3] == Catch::Approx(1.0));
  CHECK(r[1] == Catch::Approx(r[2]));
  const auto z = psd_sqrt(std::vector<double>{-1e-18}, 1);
  CHECK(z[0] == 0.0);
}

TEST_CASE("bracket root integrand reproduces the bracket") {
  const auto t = uniform_grid(0.0, 1.0, 128);
  const auto z = sample_brownian(t, 2, 11);
  const auto q = bracket_fine(z);
  const auto psi = bracket_root_integrand(q);
  std::vector<double> acc(4, 0.0);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const auto p = psi.at(k);
    const double dt = t[k + 1] - t[k];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        acc[a * 2 + b] += dt * (p[a * 2] * p[b * 2] + p[a * 2 + 1] * p[b * 2 + 1]);
  }
  for (int r = 0; r < 4; ++r) CHECK(acc[r] == Catch::Approx(q.at(128)[r]).margin(1e-12));
}

TEST_CASE("martingale with constant integrand is a scaled Brownian motion") {
  const auto t = uniform_grid(0.0, 1.0, 32);
  const auto spec = NoiseSpec::scaled_identity(t, 2, 0.5, 3);
  const auto m = martingale_from_phi(spec, 4);
  const auto b = replica_brownian(t, 2, 3, 4);
  for (std::size_t i = 0; i < m.values().size(); ++i) CHECK(m.values()[i] == Catch::Approx(0.5 * b.values()[i]));
}

TEST_CASE("replica Brownian steps do not depend on the surrounding path") {
  std::vector<double> a(3), b(3);
  replica_step_normals(1, 2, 17, a);
  replica_step_normals(1, 2, 17, b);
  CHECK(a == b);
  replica_step_normals(1, 3, 17, b);
  CHECK(a != b);
}

TEST_CASE("perturbed lift with zero noise is the base path") {
  const auto t = uniform_grid(0.0, 1.0, 16);
  const auto gamma = strat_lift(sample_brownian(t, 2, 12));
  const auto p = perturbed_lift(gamma, GridPath::zeros(t, 2));
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(max_abs_diff(p.combined[i], gamma[i]) < 1e-15);
}

TEST_CASE("perturbed lift of a sum of paths is the lift of the sum") {
  const auto t = uniform_grid(0.0, 1.0, 40);
  const auto x = sample_brownian(t, 2, 13);
  const auto m = sample_brownian(t, 2, 14);
  std::vector<double> sum(x.values().size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = x.values()[i] + m.values()[i];
  const auto direct = strat_lift(GridPath(t, 2, sum));
  const auto p = perturbed_lift(strat_lift(x), m);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(max_abs_diff(p.combined[i], direct[i]) < 1e-12);
}

TEST_CASE("parallel_for visits every index once and pairwise sums are order-stable") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  std::vector<double> xs(1001);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / static_cast<double>(i + 1);
  CHECK(pairwise_sum(xs) == pairwise_sum(xs));
  const auto ms = mean_se(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(ms.mean == 2.5);
  CHECK(ms.se == Catch::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
}
