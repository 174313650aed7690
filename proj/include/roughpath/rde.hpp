#pragma once

// Rough differential equations dY = f(π₁ Y) dγ driven by depth-2 rough paths.
//
// The step grid is the driver's grid. Each step applies
//   y ← y + f(y) π₁(γ_{k,k+1}) + (Dff)(y) π₂(γ_{k,k+1}),
// where π₂ carries both the area and the symmetric drift of the driver, so
// the same update serves geometric (Stratonovich) and Itô-type drivers.

#include <span>
#include <vector>

#include "roughpath/paths.hpp"
#include "roughpath/vector_field.hpp"

namespace rp {

enum class StepScheme {
  increment_euler,  // first- plus second-order Taylor term per step
  ode_approx,       // RK4 on dy/ds = f(y) v + (Dff)(y) L over s ∈ [0, 1]
};

struct RdeOptions {
  StepScheme scheme = StepScheme::increment_euler;
  int ode_substeps = 8;
  double blowup = 1e8;  // |y|∞ above this aborts with Diverged
};

/// Per-step increments of a depth-2 driver: level 1 (d per step) and level 2
/// (d·d per step, row-major). The solvers consume this form.
struct DriverSteps {
  int dim = 0;
  std::vector<double> times;
  std::vector<double> level1;
  std::vector<double> level2;

  std::size_t steps() const noexcept { return times.empty() ? 0 : times.size() - 1; }
  std::span<const double> v(std::size_t k) const {
    return {level1.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::span<const double> a(std::size_t k) const {
    const auto w = static_cast<std::size_t>(dim * dim);
    return {level2.data() + k * w, w};
  }

  static DriverSteps from(const RoughPathGrid& gamma);
};

struct RdeSolution {
  GridPath first_level;  // y_t on the driver's grid
  SignaturePath group;   // ξ ⊗ S_n(y)_{t₀,t}
};

/// First level only, started at y0.
GridPath solve_first_level(const RoughPathGrid& gamma, const VectorField& vf,
                           std::span<const double> y0, const RdeOptions& opts = {});

/// Group path ξ ⊗ Π_k exp(Δy_k + (f⊗f)(y_k)[L_k]) at depth ξ.depth(), where
/// L_k is the depth-2 logarithm's level-2 part of the driver increment.
SignaturePath enhance_solution(const GridPath& first_level, const RoughPathGrid& gamma,
                               const VectorField& vf, const TruncatedTensor& xi);

RdeSolution rde_solve(const RoughPathGrid& gamma, const VectorField& vf,
                      const TruncatedTensor& xi, const RdeOptions& opts = {});

/// Group increment of the solution over the whole driver, started at y0,
/// at depth n. Equivalent to rde_solve(...).group increment (0, last) with
/// π₁(ξ) = y0, without materialising the paths.
TruncatedTensor solution_increment(const RoughPathGrid& gamma, const VectorField& vf,
                                   std::span<const double> y0, int n,
                                   const RdeOptions& opts = {});

/// As above on pre-extracted steps [first, last). When y_end is given it
/// receives the terminal state.
TruncatedTensor solution_increment(const DriverSteps& steps, std::size_t first, std::size_t last,
                                   const VectorField& vf, std::span<const double> y0, int n,
                                   const RdeOptions& opts = {}, std::vector<double>* y_end = nullptr);

/// Left-point Euler–Maruyama for dy = f(y) dZ.
GridPath sde_euler_maruyama(const GridPath& z, const VectorField& vf, std::span<const double> y0,
                            double blowup = 1e8);

/// ∫ g(π₁ γ) dγ as a depth-2 path over R^e, by solving the extended system
/// dx = dγ, dI = g(x) dγ on R^{d+e} and projecting onto the I block.
RoughPathGrid rough_integral_one_form(const OneForm& g, const RoughPathGrid& gamma,
                                      const RdeOptions& opts = {});

}  // namespace rp
