#include "dra/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "dra/rng.hpp"

namespace dra {

Objective Objective::quadratic_scalar(double a, double b, double c) {
  if (!(a > 0.0)) throw std::invalid_argument("quadratic_scalar: curvature a must be positive");
  Objective o;
  o.kind_ = Kind::QuadraticScalar;
  o.dim_ = 1;
  o.a_ = a;
  o.b_ = b;
  o.c_ = c;
  return o;
}

Objective Objective::coupled_quadratic_2d(double a1, double a2) {
  Objective o;
  o.kind_ = Kind::CoupledQuadratic2D;
  o.dim_ = 2;
  o.a1_ = a1;
  o.a2_ = a2;
  return o;
}

Objective Objective::custom(int dim, ValueFn value, GradFn gradient, double modulus,
                            double gradient_lipschitz) {
  if (dim <= 0) throw std::invalid_argument("custom objective: dimension must be positive");
  if (!value || !gradient) throw std::invalid_argument("custom objective: callbacks required");
  if (modulus < 0.0) throw std::invalid_argument("custom objective: modulus must be nonnegative");
  if (!(gradient_lipschitz > 0.0))
    throw std::invalid_argument("custom objective: gradient Lipschitz constant must be positive");

  // Registration check: declared gradient against central finite differences
  // at a handful of seeded points.
  SplitMix64 rng(0xC0FFEEu);
  const double h = 1e-5;
  for (int trial = 0; trial < 8; ++trial) {
    Vec x(dim);
    for (double& xi : x) xi = rng.uniform(-1.0, 1.0);
    Vec g = gradient(x);
    if (static_cast<int>(g.size()) != dim)
      throw std::invalid_argument("custom objective: gradient has wrong dimension");
    for (int k = 0; k < dim; ++k) {
      Vec xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const double fd = (value(xp) - value(xm)) / (2.0 * h);
      if (std::abs(fd - g[k]) > 1e-5 * (1.0 + std::abs(fd)))
        throw std::invalid_argument("custom objective: gradient disagrees with finite differences");
    }
  }

  Objective o;
  o.kind_ = Kind::Custom;
  o.dim_ = dim;
  o.value_fn_ = std::move(value);
  o.grad_fn_ = std::move(gradient);
  o.custom_mu_ = modulus;
  o.custom_lip_ = gradient_lipschitz;
  return o;
}

double Objective::value(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("objective value: dimension mismatch");
  switch (kind_) {
    case Kind::QuadraticScalar:
      return a_ * x[0] * x[0] + b_ * x[0] + c_;
    case Kind::CoupledQuadratic2D: {
      const double u = x[0] + a1_ * x[1];
      return u * u + x[0] + a2_ * x[1] + 0.001 * (x[0] * x[0] + x[1] * x[1]);
    }
    case Kind::Custom:
      return value_fn_(x);
  }
  return 0.0;
}

void Objective::gradient_into(std::span<const double> x, std::span<double> out) const {
  if (static_cast<int>(x.size()) != dim_ || out.size() != x.size())
    throw std::invalid_argument("objective gradient: dimension mismatch");
  switch (kind_) {
    case Kind::QuadraticScalar:
      out[0] = 2.0 * a_ * x[0] + b_;
      return;
    case Kind::CoupledQuadratic2D: {
      const double u = x[0] + a1_ * x[1];
      out[0] = 2.0 * u + 1.0 + 0.002 * x[0];
      out[1] = 2.0 * a1_ * u + a2_ + 0.002 * x[1];
      return;
    }
    case Kind::Custom: {
      Vec g = grad_fn_(x);
      std::copy(g.begin(), g.end(), out.begin());
      return;
    }
  }
}

Vec Objective::gradient(std::span<const double> x) const {
  Vec out(dim_);
  gradient_into(x, out);
  return out;
}

double Objective::strong_convexity_modulus() const {
  switch (kind_) {
    case Kind::QuadraticScalar:
      return 2.0 * a_;
    case Kind::CoupledQuadratic2D:
      // Hessian = 2 [[1, a1], [a1, a1^2]] + 0.002 I; the rank-one part has a
      // zero eigenvalue, so the modulus is the regularization alone.
      return 0.002;
    case Kind::Custom:
      return custom_mu_;
  }
  return 0.0;
}

double Objective::gradient_lipschitz() const {
  switch (kind_) {
    case Kind::QuadraticScalar:
      return 2.0 * a_;
    case Kind::CoupledQuadratic2D:
      return 2.0 * (1.0 + a1_ * a1_) + 0.002;
    case Kind::Custom:
      return custom_lip_;
  }
  return 0.0;
}

double Objective::quad_a() const {
  if (kind_ != Kind::QuadraticScalar) throw std::logic_error("quad_a: wrong objective kind");
  return a_;
}
double Objective::quad_b() const {
  if (kind_ != Kind::QuadraticScalar) throw std::logic_error("quad_b: wrong objective kind");
  return b_;
}
double Objective::quad_c() const {
  if (kind_ != Kind::QuadraticScalar) throw std::logic_error("quad_c: wrong objective kind");
  return c_;
}
double Objective::coupled_a1() const {
  if (kind_ != Kind::CoupledQuadratic2D) throw std::logic_error("coupled_a1: wrong objective kind");
  return a1_;
}
double Objective::coupled_a2() const {
  if (kind_ != Kind::CoupledQuadratic2D) throw std::logic_error("coupled_a2: wrong objective kind");
  return a2_;
}

}  // namespace dra
