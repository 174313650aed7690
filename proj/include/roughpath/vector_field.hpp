#pragma once

// Vector fields f: R^e → L(R^d, R^e), one-forms g: R^d → L(R^d, R^e) and
// smooth maps R^d → R^e, with analytic derivatives, plus a registry of
// built-in fields selectable by name.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rp {

/// Evaluator writing its result into a caller-sized buffer.
using Evaluator = std::function<void(std::span<const double>, std::span<double>)>;

/// f: R^e → L(R^d, R^e).
///   f(y)   → e×d row-major, entry (i, j) at i*d + j
///   df(y)  → ∂f^{ij}/∂y^k at (i*d + j)*e + k
///   d2f(y) → ∂²f^{ij}/∂y^k∂y^l at ((i*d + j)*e + k)*e + l   (optional)
struct VectorField {
  std::string name;
  int d = 1;  // driver dimension
  int e = 1;  // state dimension
  Evaluator f;
  Evaluator df;
  Evaluator d2f;
  double lip_beta = 0.0;
  double lip_norm = 0.0;

  std::vector<double> eval(std::span<const double> y) const;
  std::vector<double> jacobian(std::span<const double> y) const;
};

/// (Dff)(y) as a linear map (R^d)^{⊗2} → R^e, stored e × (d·d):
/// entry (i, a*d + b) = Σ_k ∂_k f^{ib}(y) f^{ka}(y). Applied to the level-2
/// increment X^{ab} = ∫∫_{u<v} dγ^a_u dγ^b_v this is the second-order Taylor
/// term of the flow.
std::vector<double> dff(const VectorField& vf, std::span<const double> y);

/// out += (Dff)(y)[A] using precomputed f(y) and Df(y).
void apply_dff(int d, int e, std::span<const double> fy, std::span<const double> dfy,
               std::span<const double> a, std::span<double> out);

/// Checks df against central finite differences on random probes:
/// |df - fd| ≤ tol·max(1, |df|) entrywise. Returns the worst relative defect.
double check_derivatives(const VectorField& vf, int probes = 16, double radius = 2.0,
                         std::uint64_t seed = 7, double tol = 1e-5);

/// g: R^d → L(R^d, R^e) integrated against a rough path over R^d.
///   g(x)  → e×d row-major;  dg(x) → ∂g^{ij}/∂x^k at (i*d + j)*d + k.
struct OneForm {
  std::string name;
  int d = 1;
  int e = 1;
  Evaluator g;
  Evaluator dg;
};

/// φ: R^d → R^e with Jacobian (e×d) and Hessian ((i*d + j)*d + k).
struct SmoothMap {
  std::string name;
  int d = 1;
  int e = 1;
  Evaluator value;
  Evaluator jacobian;
  Evaluator hessian;

  /// Df as a one-form: g = Jacobian, dg = Hessian.
  OneForm derivative_form() const;
};

/// Built-in vector fields by key:
///   "zero"      f ≡ 0
///   "constant"  f ≡ c (all entries equal to `scale`)
///   "linear"    f^{ij}(y) = scale · y^{(i+j) mod e}   (d = e = 1: f(y) = scale·y)
///   "gbm", "linear1d"  alias of "linear" with d = e = 1
///   "sin"       f^{ij}(y) = scale · sin(y^i)
///   "trig"      f^{ij}(y) = scale · cos(y^{(i+j) mod e} + 0.3 (i+1)(j+1)), bounded
///   "polyclip"  f^{ij}(y) = scale · q(y^i + 0.25 j), q(x) = x - 2x³/3 + x⁵/5 on
///               |x| ≤ 1, constant beyond (C², bounded)
VectorField make_field(const std::string& key, int d = 1, int e = 1, double scale = 1.0);

/// Keys accepted by make_field.
std::vector<std::string> field_keys();

/// Built-in smooth maps: "linear" (Ax + b), "square" (Σ x_k²), "cube" (x³, d=1),
/// "sin" (componentwise sin summed per output).
SmoothMap make_map(const std::string& key, int d = 1, int e = 1);

}  // namespace rp
