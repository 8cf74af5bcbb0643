#pragma once

#include <span>
#include <vector>

#include "dra/linalg.hpp"

namespace dra {

// One linear inequality a . x <= b.
struct Halfspace {
  Vec a;
  double b = 0.0;
};

// A closed convex feasibility set in R^m: the whole space, an axis-aligned
// box (bounds may be +-inf), a Euclidean ball, or a finite intersection of
// halfspaces. Supports exact Euclidean projection, projection of a direction
// onto the tangent cone at a member point, and a normal-cone residual test.
//
// Polyhedra must be constructed with a strictly interior witness point;
// emptiness checking is deliberately not implemented.
class ConvexSet {
 public:
  enum class Kind { FullSpace, Box, Ball, Polyhedron };

  static ConvexSet full_space(int dim);
  static ConvexSet box(Vec lo, Vec hi);
  static ConvexSet ball(Vec center, double radius);
  static ConvexSet polyhedron(std::vector<Halfspace> halfspaces, Vec interior_point);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  // All defining inequalities hold within additive slack tol.
  bool contains(std::span<const double> x, double tol) const;

  // Nearest point of the set in the Euclidean norm.
  Vec project(std::span<const double> x) const;
  void project_into(std::span<const double> x, std::span<double> out) const;

  // Projection of direction v onto the tangent cone at x. Requires x in the
  // set within tolerance 1e-9; equals v at interior points.
  Vec tangent_project(std::span<const double> x, std::span<const double> v) const;
  void tangent_project_into(std::span<const double> x, std::span<const double> v,
                            std::span<double> out) const;

  // ||P(x + v) - x||_2; zero exactly when v lies in the normal cone at x.
  double normal_residual(std::span<const double> x, std::span<const double> v) const;

  // Euclidean distance to the set, ||x - P(x)||_2.
  double distance(std::span<const double> x) const;

  // Variant accessors (throw unless the kind matches).
  const Vec& lower() const;
  const Vec& upper() const;
  const Vec& center() const;
  double radius() const;
  const std::vector<Halfspace>& halfspaces() const;
  const Vec& interior_point() const;

 private:
  ConvexSet() = default;
  void require_dim(size_t got, const char* what) const;
  void require_member(std::span<const double> x, const char* what) const;

  Kind kind_ = Kind::FullSpace;
  int dim_ = 0;
  Vec lo_, hi_;       // Box
  Vec center_;        // Ball
  double radius_ = 0; // Ball
  std::vector<Halfspace> hs_;  // Polyhedron
  Vec witness_;                // Polyhedron interior point
};

}  // namespace dra
