#pragma once

// Itô solutions recovered from Stratonovich ones. On each partition interval
// [t_j, t_{j+1}] the state is advanced by
//   y¹ ⊗ E(y²)^{-1} ⊗ y¹,
// where y¹ solves the RDE driven by γ and y² the RDE driven by γ + S₂(M) for
// independent copies of the noise M, both started at the current state.

#include <cstdint>
#include <span>
#include <vector>

#include "roughpath/paths.hpp"
#include "roughpath/rde.hpp"
#include "roughpath/stochastic.hpp"
#include "roughpath/vector_field.hpp"

namespace rp {

enum class ExpectationMode {
  monte_carlo,
  closed_form_linear,  // analytic E(y²) for f(y) = c·y, d = e = 1, Gaussian M
};

struct SchemeConfig {
  std::vector<double> partition;  // sub-grid of the driver's grid, both endpoints included
  std::size_t mc_samples = 1000;
  std::size_t min_mc_samples = 100;
  int depth = 2;
  NoiseSpec noise;  // φ on the driver's grid; noise.seed keys the replicas
  ExpectationMode expectation_mode = ExpectationMode::monte_carlo;
  RdeOptions rde;
  double moment_p = 2.5;  // exponent p in the logged moment E‖γ + S₂(M)‖^{np}

  /// Throws InvalidArgument unless the config is usable with this driver.
  void validate(const RoughPathGrid& gamma, const VectorField& vf, const TruncatedTensor& xi) const;
};

struct IntervalDiagnostics {
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> mean_se;  // standard error of each coefficient of E(y²)
  double max_se = 0.0;
  double driver_moment = 0.0;   // sample mean of ‖(γ + S₂(M))_{t_j,t_{j+1}}‖^{np}
};

struct SchemeOutput {
  std::vector<double> partition;
  std::vector<TruncatedTensor> values;  // y^{n,D} at the partition points
  std::vector<IntervalDiagnostics> diagnostics;

  /// Piecewise-constant value: ξ at t₀, values[j+1] on (t_j, t_{j+1}].
  const TruncatedTensor& at_time(double t) const;
};

/// π₂(γ) - ½⟨M⟩ on the shared grid.
RoughPathGrid ito_rough_driver(const RoughPathGrid& gamma, const BracketGrid& bracket_m);

struct IncrementPair {
  TruncatedTensor y1;
  TruncatedTensor y2;
};

/// Group increments over grid steps [first, last) of the solutions driven by
/// γ and by γ + S₂(M), both started at π₁(state). M lives on γ's grid.
IncrementPair strat_increment_pair(std::size_t first, std::size_t last,
                                   const TruncatedTensor& state, const RoughPathGrid& gamma,
                                   const VectorField& vf, const GridPath& m,
                                   const RdeOptions& opts = {});

struct ExpectedIncrement {
  TruncatedTensor mean;
  std::vector<double> se;
  TruncatedTensor inverse;
};

/// Entrywise sample mean of the replicas (level 0 stays 1) and its inverse.
/// Throws Diverged on a non-finite replica.
ExpectedIncrement expected_increment(std::span<const TruncatedTensor> samples);
TruncatedTensor expected_increment_inverse(std::span<const TruncatedTensor> samples);

/// Analytic E(y²) for f(y) = c·y with d = e = 1 over steps [first, last),
/// started at y0: Δy = y0 (exp(c(x + M) + c²δ) - 1) with M ~ N(0, Σφ²Δt) and δ
/// the symmetric drift of γ. Depth ≥ 2 requires δ = 0.
TruncatedTensor closed_form_linear_expectation(const DriverSteps& steps, std::size_t first,
                                               std::size_t last, double c, double y0,
                                               const GridPath& phi, int n);

/// Scalar c with f(y) = c·y, if the field is (numerically) of that form.
bool scalar_linear_coefficient(const VectorField& vf, double& c);

SchemeOutput concat_discounted(const RoughPathGrid& gamma, const VectorField& vf,
                               const TruncatedTensor& xi, const SchemeConfig& cfg);

/// Noise with ψ = sqrt(d⟨Z⟩/dt) per fine step, so that the noise has the
/// (realised) bracket of Z.
NoiseSpec ztilde_noise(const GridPath& z, std::uint64_t seed, std::size_t paths);

struct ConvergenceRow {
  int m = 0;
  std::size_t intervals = 0;
  std::vector<double> level_error;  // sup over partition points of |π_k(y) - π_k(Y)|, k = 1..n
  double error = 0.0;               // max over levels
  double max_se = 0.0;              // worst coefficient SE of E(y²) over intervals
};

/// Runs the scheme on dyadic partitions D_m of the driver's grid and compares
/// with the reference group path (same grid) at partition points.
std::vector<ConvergenceRow> convergence_study(const RoughPathGrid& gamma, const VectorField& vf,
                                              const TruncatedTensor& xi, const SchemeConfig& base,
                                              std::span<const int> levels,
                                              const SignaturePath& reference);

/// rde_solve over ito_rough_driver(γ, ⟨M⟩) at depth ξ.depth().
SignaturePath ito_reference(const RoughPathGrid& gamma, const BracketGrid& bracket_m,
                            const VectorField& vf, const TruncatedTensor& xi,
                            const RdeOptions& opts = {});

}  // namespace rp
