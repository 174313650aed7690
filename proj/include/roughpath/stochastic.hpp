#pragma once

// Brownian motion, martingales M = ∫ φ dB, their Itô and Stratonovich level-2
// lifts, brackets, and the perturbed rough path γ + S₂(M).
//
// Discretisation: Itô integrals are left-point sums on the path's own grid,
// Stratonovich integrals are trapezoid sums (identical to the signature of the
// piecewise-linear interpolation). The reference bracket is the realised
// quadratic variation on the finest available grid.

#include <cstdint>
#include <span>
#include <vector>

#include "roughpath/paths.hpp"
#include "roughpath/random.hpp"

namespace rp {

/// d-dimensional Brownian path on the grid with B_{t₀} = 0.
GridPath sample_brownian(const std::vector<double>& times, int d, RandomStream& rng);
GridPath sample_brownian(const std::vector<double>& times, int d, std::uint64_t seed);

/// Matrix-valued integrand φ (a path in R^{d·d}, row-major) with its seed and
/// Monte Carlo replica count.
struct NoiseSpec {
  GridPath phi;
  std::uint64_t seed = 0;
  std::size_t paths = 1;

  int dim() const;
  /// Constant φ ≡ c·I on the grid.
  static NoiseSpec scaled_identity(std::vector<double> times, int d, double c,
                                   std::uint64_t seed = 0, std::size_t paths = 1);
};

/// M_{t_{i+1}} = M_{t_i} + φ_{t_i} (B_{t_{i+1}} - B_{t_i}), M_{t₀} = 0.
GridPath martingale_from_phi(const GridPath& phi, const GridPath& brownian);

/// Standard normals driving grid step `step` of Monte Carlo replica `replica`.
/// Each (seed, replica, step) has its own stream, so a replica's Brownian path
/// is the same whichever partition interval the step falls in, and disjoint
/// intervals get independent noise.
void replica_step_normals(std::uint64_t seed, std::uint64_t replica, std::uint64_t step,
                          std::span<double> out);

/// Brownian path of replica `replica` on the grid, built from replica_step_normals.
GridPath replica_brownian(const std::vector<double>& times, int d, std::uint64_t seed,
                          std::uint64_t replica);

/// Samples B = replica_brownian(φ's grid, seed, replica) and integrates φ.
GridPath martingale_from_phi(const NoiseSpec& spec, std::uint64_t replica);

/// Builds a depth-2 path from level-1 values and row-major level-2 blocks.
RoughPathGrid make_depth2(const std::vector<double>& times, int d, std::span<const double> level1,
                          std::span<const double> level2);

/// I₂(Z): level 2 by left-point sums Σ (Z_{t_i} - Z_{t₀}) ⊗ ΔZ_i.
RoughPathGrid ito_lift(const GridPath& z);

/// S₂(Z): level 2 by trapezoid sums; equals pl_signature(Z, 2).
RoughPathGrid strat_lift(const GridPath& z);

/// ⟨Z⟩^D on Z's grid: cumulative (Z_{t_{k+1}} - Z_{t_k})^{⊗2} over D-intervals,
/// linearly interpolated inside each interval. D must be a sub-grid of Z's grid
/// containing both endpoints.
BracketGrid bracket_pl(const GridPath& z, std::span<const double> partition);

/// Realised bracket on the full grid (bracket_pl with D = grid).
BracketGrid bracket_fine(const GridPath& z);

/// I₂(Z)^D on Z's grid: signature of the chord interpolation Z^D minus ½⟨Z⟩^D.
RoughPathGrid pl_ito_lift(const GridPath& z, std::span<const double> partition);

/// γ with π₂ shifted by sign·½Q_t at every grid time.
RoughPathGrid shift_level2(const RoughPathGrid& gamma, const BracketGrid& q, int sign);

struct PerturbedLift {
  RoughPathGrid base;   // γ
  RoughPathGrid noise;  // S₂(M)
  GridPath cross;       // ∫π₁(γ)⊗∘dM + ∫M⊗∘dπ₁(γ), in R^{d·d}
  RoughPathGrid combined;
};

/// γ + S₂(M) with Stratonovich (trapezoid) cross integrals on the shared grid.
PerturbedLift perturbed_lift(const RoughPathGrid& gamma, const GridPath& m);

/// Symmetric positive-semidefinite square root of a symmetric d×d matrix;
/// negative eigenvalues from round-off are clipped to 0.
std::vector<double> psd_sqrt(std::span<const double> a, int d);

/// Integrand ψ for a martingale with the given bracket: per grid step,
/// ψ_i = sqrt(Δ⟨Z⟩_i / Δt_i) (PSD root), so that ∫ψψᵀ dt = ⟨Z⟩ on the grid.
/// The last grid point repeats the previous value.
GridPath bracket_root_integrand(const BracketGrid& bracket);

}  // namespace rp
