#pragma once

// Pathwise Itô's lemma. The Stratonovich signature of f(Z) splits into the
// rough integral of Df against the Itô lift of Z plus a bounded-variation
// rough path H built from the bracket:
//   x¹ = ½ ∫ D²f(Z) d⟨Z⟩,   x² = ½ ∫ Df(Z) ⊗ Df(Z) d⟨Z⟩,
//   H = (1, x¹, ∫ x¹ ⊗ dx¹ + x²),
// with Young cross integrals between the two level-1 paths at level 2.
// Everything is evaluated on Z's own grid with left-point sums.

#include <optional>

#include "roughpath/paths.hpp"
#include "roughpath/rde.hpp"
#include "roughpath/vector_field.hpp"

namespace rp {

/// Cumulative left-point sums Σ a_{t_k} ⊗ (h_{t_{k+1}} - h_{t_k}), a path in
/// R^{da·dh} starting at 0.
GridPath young_integral(const GridPath& a, const GridPath& h);

struct HPath {
  GridPath x1;      // R^e
  GridPath x2;      // R^{e·e}
  RoughPathGrid h;  // depth 2 over R^e
};

/// Requires f.hessian. The bracket lives on Z's grid.
HPath build_h_path(const SmoothMap& f, const GridPath& z, const BracketGrid& bracket);

/// f(Z) on Z's grid.
GridPath apply_map(const SmoothMap& f, const GridPath& z);

struct ItoLemmaReport {
  double mesh = 0.0;
  double level1 = 0.0;  // sup_t |π₁(LHS_t) - π₁(RHS_t)|
  double level2 = 0.0;  // sup_t |π₂(LHS_t) - π₂(RHS_t)|
};

struct ItoLemmaTerms {
  RoughPathGrid lhs;       // S₂(f(Z)) re-based at the identity
  RoughPathGrid integral;  // ∫ Df(Z) dI₂(Z)
  HPath h;
  RoughPathGrid rhs;
};

/// Both sides of the decomposition. The bracket defaults to the realised one.
ItoLemmaTerms ito_lemma_terms(const SmoothMap& f, const GridPath& z,
                              const std::optional<BracketGrid>& bracket = std::nullopt,
                              const RdeOptions& opts = {});

ItoLemmaReport verify_ito_lemma(const SmoothMap& f, const GridPath& z,
                                const std::optional<BracketGrid>& bracket = std::nullopt,
                                const RdeOptions& opts = {});

}  // namespace rp
