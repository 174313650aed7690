#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "roughpath/error.hpp"
#include "roughpath/random.hpp"
#include "roughpath/tensor.hpp"

using namespace rp;

namespace {

TruncatedTensor random_element(RandomStream& rng, int d, int n, double scale = 1.0) {
  TruncatedTensor g(d, n);
  for (double& x : g.coefficients()) x = scale * (2.0 * rng.uniform() - 1.0);
  return g;
}

// Coefficient of the word with flat index `idx` at level k, level 0 being 1.
double coeff(const TruncatedTensor& g, int k, std::size_t idx) {
  return k == 0 ? 1.0 : g.level(k)[idx];
}

// (g ⊗ h)^w = Σ_{w = uv} g^u h^v, spelled out word by word.
TruncatedTensor naive_mul(const TruncatedTensor& g, const TruncatedTensor& h) {
  const int d = g.dim(), n = g.depth();
  TruncatedTensor out(d, n);
  for (int k = 1; k <= n; ++k) {
    std::size_t words = 1;
    for (int i = 0; i < k; ++i) words *= static_cast<std::size_t>(d);
    for (std::size_t w = 0; w < words; ++w) {
      double s = 0.0;
      std::size_t tail = 1;
      for (int j = 0; j <= k; ++j) {
        // split: prefix of length k - j, suffix of length j
        const std::size_t u = w / tail, v = w % tail;
        s += coeff(g, k - j, u) * coeff(h, j, v);
        tail *= static_cast<std::size_t>(d);
      }
      out.level(k)[w] = s;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("product agrees with the word-by-word definition") {
  RandomStream rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    const int n = 1 + static_cast<int>(rng.next_u64() % 5);
    const auto g = random_element(rng, d, n), h = random_element(rng, d, n);
    REQUIRE(max_abs_diff(mul(g, h), naive_mul(g, h)) < 1e-12);
  }
}

TEST_CASE("mul_into matches mul") {
  RandomStream rng(2);
  const auto g = random_element(rng, 3, 4), h = random_element(rng, 3, 4);
  TruncatedTensor out(3, 4);
  mul_into(out, g, h);
  CHECK(max_abs_diff(out, mul(g, h)) == 0.0);
}

TEST_CASE("inverse, identity and shape checks") {
  RandomStream rng(3);
  const auto g = random_element(rng, 2, 5);
  CHECK(max_abs_diff(mul(g, inverse(g)), TruncatedTensor::identity(2, 5)) < 1e-12);
  CHECK(TruncatedTensor::identity(4, 3).is_identity());
  CHECK_THROWS_AS(mul(TruncatedTensor(2, 2), TruncatedTensor(3, 2)), InvalidArgument);
}

TEST_CASE("dilation is a group homomorphism and scales the homogeneous norm") {
  RandomStream rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_element(rng, 2, 4), h = random_element(rng, 2, 4);
    const double c = 0.1 + 3.0 * rng.uniform();
    CHECK(max_abs_diff(dilate(mul(g, h), c), mul(dilate(g, c), dilate(h, c))) < 1e-10);
    CHECK(homogeneous_norm(dilate(g, c)) == Catch::Approx(c * homogeneous_norm(g)).epsilon(1e-12));
  }
}

TEST_CASE("truncation commutes with the product") {
  RandomStream rng(5);
  const auto g = random_element(rng, 3, 4), h = random_element(rng, 3, 4);
  CHECK(max_abs_diff(truncate(mul(g, h), 2), mul(truncate(g, 2), truncate(h, 2))) < 1e-14);
}

TEST_CASE("exp_levels12 of a pure vector is its tensor exponential") {
  const std::vector<double> v{0.3, -1.2};
  const std::vector<double> zero(4, 0.0);
  const auto g = exp_levels12(v, zero, 2, 4);
  CHECK(g.level(1)[1] == Catch::Approx(-1.2));
  CHECK(g.level(2)[0 * 2 + 1] == Catch::Approx(0.5 * 0.3 * -1.2));
  CHECK(g.level(3)[1 * 4 + 1 * 2 + 1] == Catch::Approx(std::pow(-1.2, 3) / 6.0));
  CHECK(g.level(4)[0] == Catch::Approx(std::pow(0.3, 4) / 24.0));
}

TEST_CASE("symmetric and antisymmetric parts add up") {
  const std::vector<double> a{1, 2, 3, 4};
  const auto s = sym_part(a, 2), n = anti_part(a, 2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(s[i] + n[i] == Catch::Approx(a[i]));
  CHECK(s[1] == s[2]);
  CHECK(n[1] == -n[2]);
}

TEST_CASE("geometric part of the decomposition has no symmetric drift") {
  RandomStream rng(6);
  const auto g = random_element(rng, 3, 2);
  const auto dec = decompose_geo_drift(g);
  CHECK(max_abs_diff(recombine(dec), g) < 1e-14);
  const auto v = dec.geometric.level(1);
  const auto s2 = sym_part(dec.geometric.level(2), 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(s2[a * 3 + b] == Catch::Approx(0.5 * v[a] * v[b]).margin(1e-14));
}
