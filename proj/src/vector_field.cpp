#include "roughpath/vector_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roughpath/error.hpp"
#include "roughpath/random.hpp"

namespace rp {

std::vector<double> VectorField::eval(std::span<const double> y) const {
  std::vector<double> out(static_cast<std::size_t>(e * d));
  f(y, out);
  return out;
}

std::vector<double> VectorField::jacobian(std::span<const double> y) const {
  if (!df) throw Unsupported("vector field '" + name + "' has no derivative");
  std::vector<double> out(static_cast<std::size_t>(e * d * e));
  df(y, out);
  return out;
}

void apply_dff(int d, int e, std::span<const double> fy, std::span<const double> dfy,
               std::span<const double> a, std::span<double> out) {
  for (int i = 0; i < e; ++i) {
    double s = 0.0;
    for (int b = 0; b < d; ++b) {
      const double* grad = dfy.data() + static_cast<std::size_t>((i * d + b) * e);
      for (int ai = 0; ai < d; ++ai) {
        const double x = a[static_cast<std::size_t>(ai * d + b)];
        if (x == 0.0) continue;
        double dir = 0.0;  // ∂f^{ib} in direction of column a of f
        for (int k = 0; k < e; ++k) dir += grad[k] * fy[static_cast<std::size_t>(k * d + ai)];
        s += dir * x;
      }
    }
    out[static_cast<std::size_t>(i)] += s;
  }
}

std::vector<double> dff(const VectorField& vf, std::span<const double> y) {
  const int d = vf.d, e = vf.e;
  const auto fy = vf.eval(y);
  const auto dfy = vf.jacobian(y);
  std::vector<double> out(static_cast<std::size_t>(e * d * d), 0.0);
  for (int i = 0; i < e; ++i)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double s = 0.0;
        for (int k = 0; k < e; ++k)
          s += dfy[static_cast<std::size_t>((i * d + b) * e + k)] *
               fy[static_cast<std::size_t>(k * d + a)];
        out[static_cast<std::size_t>(i * d * d + a * d + b)] = s;
      }
  return out;
}

double check_derivatives(const VectorField& vf, int probes, double radius, std::uint64_t seed,
                         double tol) {
  if (!vf.df) throw Unsupported("vector field '" + vf.name + "' has no derivative");
  RandomStream rng(seed, {0xF1E1D});
  const auto e = static_cast<std::size_t>(vf.e);
  const auto w = static_cast<std::size_t>(vf.e * vf.d);
  std::vector<double> y(e), yp(e), ym(e), fp(w), fm(w), jac(w * e);
  double worst = 0.0;
  const double h = 1e-6;
  for (int p = 0; p < probes; ++p) {
    for (auto& v : y) v = radius * (2.0 * rng.uniform() - 1.0);
    vf.df(y, jac);
    for (std::size_t k = 0; k < e; ++k) {
      yp = y;
      ym = y;
      yp[k] += h;
      ym[k] -= h;
      vf.f(yp, fp);
      vf.f(ym, fm);
      for (std::size_t q = 0; q < w; ++q) {
        const double fd = (fp[q] - fm[q]) / (2.0 * h);
        const double an = jac[q * e + k];
        if (!std::isfinite(an) || !std::isfinite(fd))
          throw InvalidArgument("vector field '" + vf.name + "' is not finite at a probe");
        worst = std::max(worst, std::abs(an - fd) / std::max(1.0, std::abs(an)));
      }
    }
  }
  if (worst > tol)
    throw InvalidArgument("vector field '" + vf.name + "': derivative disagrees with finite differences");
  return worst;
}

OneForm SmoothMap::derivative_form() const {
  if (!hessian) throw Unsupported("map '" + name + "' has no second derivative");
  return OneForm{"D" + name, d, e, jacobian, hessian};
}

namespace {

// q(x) = x - 2x³/3 + x⁵/5 on [-1, 1], q' = (1 - x²)², q'' = -4x(1 - x²).
double polyclip(double x) {
  if (x >= 1.0) return 8.0 / 15.0;
  if (x <= -1.0) return -8.0 / 15.0;
  const double x2 = x * x;
  return x * (1.0 - 2.0 * x2 / 3.0 + x2 * x2 / 5.0);
}
double polyclip_d1(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  const double u = 1.0 - x * x;
  return u * u;
}
double polyclip_d2(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return -4.0 * x * (1.0 - x * x);
}

}  // namespace

VectorField make_field(const std::string& key, int d, int e, double scale) {
  require(d >= 1 && e >= 1, "make_field: dimensions must be >= 1");
  VectorField vf;
  vf.name = key;
  vf.d = d;
  vf.e = e;
  const auto du = static_cast<std::size_t>(d);
  const auto eu = static_cast<std::size_t>(e);
  auto zero_fill = [](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };

  if (key == "zero" || key == "constant") {
    const double c = key == "zero" ? 0.0 : scale;
    vf.f = [c](std::span<const double>, std::span<double> out) {
      std::fill(out.begin(), out.end(), c);
    };
    vf.df = zero_fill;
    vf.d2f = zero_fill;
    vf.lip_beta = 1e9;
    vf.lip_norm = std::abs(c);
    return vf;
  }
  if (key == "linear" || key == "gbm" || key == "linear1d") {
    if (key != "linear") require(d == 1 && e == 1, "field '" + key + "' is scalar (d = e = 1)");
    vf.f = [=](std::span<const double> y, std::span<double> out) {
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t j = 0; j < du; ++j) out[i * du + j] = scale * y[(i + j) % eu];
    };
    vf.df = [=](std::span<const double>, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t j = 0; j < du; ++j) out[(i * du + j) * eu + (i + j) % eu] = scale;
    };
    vf.d2f = zero_fill;
    // Unbounded: Lip(β) only locally.
    vf.lip_beta = 1e9;
    vf.lip_norm = std::numeric_limits<double>::infinity();
    return vf;
  }
  if (key == "sin") {
    vf.f = [=](std::span<const double> y, std::span<double> out) {
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t j = 0; j < du; ++j) out[i * du + j] = scale * std::sin(y[i]);
    };
    vf.df = [=](std::span<const double> y, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t j = 0; j < du; ++j) out[(i * du + j) * eu + i] = scale * std::cos(y[i]);
    };
    vf.d2f = [=](std::span<const double> y, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t j = 0; j < du; ++j)
          out[((i * du + j) * eu + i) * eu + i] = -scale * std::sin(y[i]);
    };
    vf.lip_beta = 1e9;
    vf.lip_norm = std::abs(scale);
    return vf;
  }
  if (key == "trig") {
    auto phase = [](std::size_t i, std::size_t j) {
      return 0.3 * static_cast<double>((i + 1) * (j + 1));
    };
    vf.f = [=](std::span<const double> y, std::span<double> out) {
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t j = 0; j < du; ++j)
          out[i * du + j] = scale * std::cos(y[(i + j) % eu] + phase(i, j));
    };
    vf.df = [=](std::span<const double> y, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t j = 0; j < du; ++j) {
          const std::size_t k = (i + j) % eu;
          out[(i * du + j) * eu + k] = -scale * std::sin(y[k] + phase(i, j));
        }
    };
    vf.d2f = [=](std::span<const double> y, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t j = 0; j < du; ++j) {
          const std::size_t k = (i + j) % eu;
          out[((i * du + j) * eu + k) * eu + k] = -scale * std::cos(y[k] + phase(i, j));
        }
    };
    vf.lip_beta = 1e9;
    vf.lip_norm = std::abs(scale);
    return vf;
  }
  if (key == "polyclip") {
    vf.f = [=](std::span<const double> y, std::span<double> out) {
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t j = 0; j < du; ++j)
          out[i * du + j] = scale * polyclip(y[i] + 0.25 * static_cast<double>(j));
    };
    vf.df = [=](std::span<const double> y, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t j = 0; j < du; ++j)
          out[(i * du + j) * eu + i] = scale * polyclip_d1(y[i] + 0.25 * static_cast<double>(j));
    };
    vf.d2f = [=](std::span<const double> y, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t j = 0; j < du; ++j)
          out[((i * du + j) * eu + i) * eu + i] =
              scale * polyclip_d2(y[i] + 0.25 * static_cast<double>(j));
    };
    // Second derivative is Lipschitz but not C¹ at |x| = 1.
    vf.lip_beta = 3.0;
    vf.lip_norm = 4.0 * std::abs(scale);
    return vf;
  }
  throw InvalidArgument("unknown vector field '" + key + "'");
}

std::vector<std::string> field_keys() {
  return {"zero", "constant", "linear", "gbm", "linear1d", "sin", "trig", "polyclip"};
}

SmoothMap make_map(const std::string& key, int d, int e) {
  require(d >= 1 && e >= 1, "make_map: dimensions must be >= 1");
  SmoothMap m;
  m.name = key;
  m.d = d;
  m.e = e;
  const auto du = static_cast<std::size_t>(d);
  const auto eu = static_cast<std::size_t>(e);
  auto zero_fill = [](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };

  if (key == "linear") {
    auto coef = [](std::size_t i, std::size_t k) {
      return 1.0 + 0.5 * static_cast<double>(i) - 0.25 * static_cast<double>(k);
    };
    m.value = [=](std::span<const double> x, std::span<double> out) {
      for (std::size_t i = 0; i < eu; ++i) {
        double s = 0.1 * static_cast<double>(i + 1);
        for (std::size_t k = 0; k < du; ++k) s += coef(i, k) * x[k];
        out[i] = s;
      }
    };
    m.jacobian = [=](std::span<const double>, std::span<double> out) {
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t k = 0; k < du; ++k) out[i * du + k] = coef(i, k);
    };
    m.hessian = zero_fill;
    return m;
  }
  if (key == "square" || key == "cube" || key == "sin") {
    const int kind = key == "square" ? 0 : key == "cube" ? 1 : 2;
    auto phase = [](std::size_t i) { return 0.5 * static_cast<double>(i); };
    auto v0 = [=](double x, std::size_t i) {
      return kind == 0 ? x * x : kind == 1 ? x * x * x : std::sin(x + phase(i));
    };
    auto v1 = [=](double x, std::size_t i) {
      return kind == 0 ? 2.0 * x : kind == 1 ? 3.0 * x * x : std::cos(x + phase(i));
    };
    auto v2 = [=](double x, std::size_t i) {
      return kind == 0 ? 2.0 : kind == 1 ? 6.0 * x : -std::sin(x + phase(i));
    };
    m.value = [=](std::span<const double> x, std::span<double> out) {
      for (std::size_t i = 0; i < eu; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < du; ++k) s += v0(x[k], i);
        out[i] = s;
      }
    };
    m.jacobian = [=](std::span<const double> x, std::span<double> out) {
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t k = 0; k < du; ++k) out[i * du + k] = v1(x[k], i);
    };
    m.hessian = [=](std::span<const double> x, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < eu; ++i)
        for (std::size_t k = 0; k < du; ++k) out[(i * du + k) * du + k] = v2(x[k], i);
    };
    return m;
  }
  throw InvalidArgument("unknown map '" + key + "'");
}

}  // namespace rp
