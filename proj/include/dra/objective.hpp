#pragma once

#include <functional>
#include <span>

#include "dra/linalg.hpp"

namespace dra {

// A differentiable convex local cost. Three families:
//  - quadratic_scalar: f(p) = a p^2 + b p + c with a > 0 (m = 1)
//  - coupled_quadratic_2d: f(x) = (x1 + a1 x2)^2 + x1 + a2 x2 + 0.001 (x1^2 + x2^2)
//  - custom: user callbacks with a declared strong-convexity modulus and
//    gradient Lipschitz constant; the gradient is validated against finite
//    differences at construction.
class Objective {
 public:
  enum class Kind { QuadraticScalar, CoupledQuadratic2D, Custom };

  using ValueFn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<Vec(std::span<const double>)>;

  static Objective quadratic_scalar(double a, double b, double c);
  static Objective coupled_quadratic_2d(double a1, double a2);
  static Objective custom(int dim, ValueFn value, GradFn gradient, double modulus,
                          double gradient_lipschitz);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  double value(std::span<const double> x) const;
  void gradient_into(std::span<const double> x, std::span<double> out) const;
  Vec gradient(std::span<const double> x) const;

  // Smallest Hessian eigenvalue for the quadratic families, declared value
  // for custom objectives.
  double strong_convexity_modulus() const;
  // Largest Hessian eigenvalue / declared Lipschitz constant of the gradient.
  double gradient_lipschitz() const;

  // Coefficient accessors for serialization (throw on kind mismatch).
  double quad_a() const;
  double quad_b() const;
  double quad_c() const;
  double coupled_a1() const;
  double coupled_a2() const;

 private:
  Objective() = default;

  Kind kind_ = Kind::QuadraticScalar;
  int dim_ = 1;
  double a_ = 1.0, b_ = 0.0, c_ = 0.0;  // quadratic_scalar
  double a1_ = 0.0, a2_ = 0.0;          // coupled_quadratic_2d
  ValueFn value_fn_;
  GradFn grad_fn_;
  double custom_mu_ = 0.0, custom_lip_ = 1.0;
};

}  // namespace dra
