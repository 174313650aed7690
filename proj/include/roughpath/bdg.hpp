#pragma once

// Monte Carlo moments behind the group-valued BDG inequality
//   E F(‖I_n(Z)‖_{p-var}) ≍ E F(‖⟨Z⟩‖_∞^{1/2})
// for the power family F(x) = x^q.

#include <cstdint>
#include <functional>
#include <vector>

#include "roughpath/parallel.hpp"
#include "roughpath/paths.hpp"

namespace rp {

/// Draws replica `replica` of a martingale on [0, horizon].
using MartingaleGenerator = std::function<GridPath(std::uint64_t replica, double horizon)>;

/// c·B for a d-dimensional Brownian motion B on a uniform grid with `steps` steps.
MartingaleGenerator brownian_generator(int d, std::size_t steps, double scale, std::uint64_t seed);

struct BdgConfig {
  double p = 2.5;
  double q = 2.0;
  int n = 2;
  std::size_t paths = 1000;
  std::size_t min_paths = 1000;
  double horizon = 1.0;
};

struct MomentReport {
  double p = 0.0, q = 0.0, horizon = 0.0;
  int n = 0;
  std::size_t paths = 0;
  MeanSe signature_pvar;  // E ‖I_n(Z)‖_{p-var}^q
  MeanSe bracket;         // E ‖⟨Z⟩‖_∞^{q/2}
  MeanSe endpoint;        // E |Z_T - Z_0|^q
  double ratio = 0.0;     // signature_pvar / bracket
  double ratio_se = 0.0;
  double endpoint_ratio = 0.0;  // endpoint / bracket
  double endpoint_ratio_se = 0.0;
};

/// ‖I_n(Z)‖_{p-var} with the homogeneous norm: Euclidean p-variation of Z for
/// n = 1, the Itô lift for n = 2, its extension for n ≥ 3.
double ito_signature_pvar(const GridPath& z, int n, double p);

MomentReport bdg_ratio_check(const MartingaleGenerator& gen, const BdgConfig& cfg);

}  // namespace rp
