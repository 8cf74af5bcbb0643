#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dra/convex_set.hpp"
#include "dra/rng.hpp"
#include "helpers.hpp"

using namespace dra;
using namespace dra::testing;

namespace {

Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

double dist2(const Vec& a, const Vec& b) { return norm2(sub(a, b)); }

// Independent projection certificate: membership, the variational inequality
// against sampled members, and distance domination over sampled members.
void check_projection_certificate(const ConvexSet& set, const Vec& x, SplitMix64& rng) {
  const Vec p = set.project(x);
  REQUIRE(set.contains(p, 1e-9));
  const Vec xp = sub(x, p);
  for (int trial = 0; trial < 40; ++trial) {
    const Vec y = interior_point(rng, set);
    CHECK(dot(xp, sub(p, y)) >= -1e-9);
    CHECK(dist2(x, p) <= dist2(x, y) + 1e-9);
  }
}

}  // namespace

TEST_CASE("contains: named examples") {
  const auto box = ConvexSet::box({0, 0}, {1, 1});
  CHECK(box.contains(Vec{0.5, 0.5}, 0.0));
  CHECK_FALSE(box.contains(Vec{1.2, 0.5}, 0.0));
  CHECK(box.contains(Vec{1.05, 0.5}, 0.1));

  const auto ball = ConvexSet::ball({2, 3}, 5.0);
  CHECK_FALSE(ball.contains(Vec{2, 9}, 0.0));  // distance 6 > 5
  CHECK(ball.contains(Vec{2, 8}, 0.0));

  const auto poly = ConvexSet::polyhedron(
      {{{-1, 0}, 0.0}, {{0, -1}, 0.0}, {{1, 2}, 4.0}}, {0.5, 0.5});
  CHECK(poly.contains(Vec{2.8, 0.6}, 1e-12));  // on the x1 + 2 x2 = 4 facet
  CHECK_FALSE(poly.contains(Vec{2.8, 0.7}, 1e-12));

  CHECK_THROWS_AS(box.contains(Vec{0.5}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(box.contains(Vec{0.5, 0.5}, -1.0), std::invalid_argument);
}

TEST_CASE("construction invariants") {
  CHECK_THROWS_AS(ConvexSet::box({1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::ball({0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::ball({0.0}, -1.0), std::invalid_argument);
  // Witness must be strictly interior.
  CHECK_THROWS_AS(ConvexSet::polyhedron({{{1.0}, 0.0}}, {0.0}), std::invalid_argument);
  // Zero normal is rejected.
  CHECK_THROWS_AS(ConvexSet::polyhedron({{{0.0, 0.0}, 1.0}}, {0.0, 0.0}), std::invalid_argument);
  // Infinite box bounds are fine.
  const auto half_line = ConvexSet::box({0.0}, {kInf});
  CHECK(half_line.contains(Vec{1e9}, 0.0));
}

TEST_CASE("project: named examples") {
  const auto ball = ConvexSet::ball({2, 3}, 5.0);
  const Vec p1 = ball.project(Vec{2, 9});  // radially above the center
  CHECK(p1[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p1[1] == doctest::Approx(8.0).epsilon(1e-12));

  // Member points are fixed.
  const Vec inside{3.0, 4.0};
  CHECK(ball.project(inside) == inside);

  // Hand-derived: projecting (5,5) onto {x>=0, x1+2x2<=4} lands on the facet
  // x1+2x2=4 at (5,5) - (11/5)(1,2) = (2.8, 0.6), which is feasible.
  const auto poly = ConvexSet::polyhedron(
      {{{-1, 0}, 0.0}, {{0, -1}, 0.0}, {{1, 2}, 4.0}}, {0.5, 0.5});
  const Vec p2 = poly.project(Vec{5, 5});
  CHECK(p2[0] == doctest::Approx(2.8).epsilon(1e-12));
  CHECK(p2[1] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("project: certificate on random sets and idempotency") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int dim = rng.uniform_int(1, 3);
    const ConvexSet set = random_set(rng, dim);
    const Vec x = random_vec(rng, dim, -8.0, 8.0);
    check_projection_certificate(set, x, rng);

    const Vec p = set.project(x);
    const Vec pp = set.project(p);
    for (int k = 0; k < dim; ++k) CHECK(std::abs(pp[k] - p[k]) <= 1e-12);
  }
}

TEST_CASE("projection identities (inner-product, pythagorean, nonexpansive)") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    const int dim = rng.uniform_int(1, 3);
    const ConvexSet set = random_set(rng, dim);
    const Vec x = random_vec(rng, dim, -8.0, 8.0);
    const Vec x2 = random_vec(rng, dim, -8.0, 8.0);
    const Vec y = interior_point(rng, set);
    const Vec p = set.project(x);
    const Vec p2 = set.project(x2);

    CHECK(dot(sub(x, p), sub(p, y)) >= -1e-9);
    const double lhs = dist2(x, p) * dist2(x, p) + dist2(p, y) * dist2(p, y);
    const double rhs = dist2(x, y) * dist2(x, y);
    CHECK(lhs <= rhs + 1e-9);
    CHECK(dist2(p, p2) <= dist2(x, x2) + 1e-9);
  }
}

TEST_CASE("tangent_project: interior and clamp examples") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = rng.uniform_int(1, 3);
    const ConvexSet set = random_set(rng, dim);
    const Vec x = interior_point(rng, set);
    if (!set.contains(x, 0.0) || set.distance(x) > 0) continue;
    const Vec v = random_vec(rng, dim, -3.0, 3.0);
    if (set.kind() != ConvexSet::Kind::FullSpace && set.kind() != ConvexSet::Kind::Box) {
      // Interior points pass the direction through unchanged.
      const Vec w = set.tangent_project(x, v);
      for (int k = 0; k < dim; ++k) CHECK(w[k] == doctest::Approx(v[k]).epsilon(1e-12));
    }
  }

  const auto box = ConvexSet::box({0.0}, {1.0});
  CHECK(box.tangent_project(Vec{1.0}, Vec{1.0})[0] == 0.0);    // outward at hi
  CHECK(box.tangent_project(Vec{1.0}, Vec{-1.0})[0] == -1.0);  // inward at hi
  CHECK(box.tangent_project(Vec{0.0}, Vec{-2.0})[0] == 0.0);
  CHECK(box.tangent_project(Vec{0.5}, Vec{7.0})[0] == 7.0);

  // Ball boundary with an oblique direction: normal component removed.
  const auto ball = ConvexSet::ball({2, 3}, 5.0);
  const Vec w = ball.tangent_project(Vec{2, 8}, Vec{3, 4});
  CHECK(w[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(w[1] == doctest::Approx(0.0).epsilon(1e-9));

  CHECK_THROWS_AS(ball.tangent_project(Vec{2, 9}, Vec{1, 0}), std::domain_error);
}

TEST_CASE("tangent_project at a polyhedral corner") {
  // Corner (0, 2) of {x >= 0, x1 + 2 x2 <= 4}: active normals (-1, 0) and
  // (1, 2), tangent cone {w1 >= 0, w1 + 2 w2 <= 0}.
  const auto poly = ConvexSet::polyhedron(
      {{{-1, 0}, 0.0}, {{0, -1}, 0.0}, {{1, 2}, 4.0}}, {0.5, 0.5});
  const Vec corner{0.0, 2.0};

  // Inside the cone: passes through.
  const Vec w1 = poly.tangent_project(corner, Vec{1.0, -1.0});
  CHECK(w1[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w1[1] == doctest::Approx(-1.0).epsilon(1e-12));

  // Hand-derived: (-1, 0) projects to the apex, as does (0, 1) (its nearest
  // cone point has w1 = -0.4 < 0 on the relaxed face, so the apex wins).
  for (const Vec v : {Vec{-1.0, 0.0}, Vec{0.0, 1.0}}) {
    const Vec w = poly.tangent_project(corner, v);
    CHECK(std::abs(w[0]) <= 1e-12);
    CHECK(std::abs(w[1]) <= 1e-12);
  }

  // Oblique outward direction lands on the x1 + 2 w2 = 0 edge of the cone:
  // (1, 1) - (3/5)(1, 2) = (0.4, -0.2).
  const Vec w2 = poly.tangent_project(corner, Vec{1.0, 1.0});
  CHECK(w2[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(w2[1] == doctest::Approx(-0.2).epsilon(1e-12));

  // Box corner: both coordinates active, outward components vanish.
  const auto box = ConvexSet::box({0.0, 0.0}, {1.0, 1.0});
  const Vec wc = box.tangent_project(Vec{1.0, 0.0}, Vec{2.0, -3.0});
  CHECK(wc[0] == 0.0);
  CHECK(wc[1] == 0.0);
  const Vec wd = box.tangent_project(Vec{1.0, 0.0}, Vec{-2.0, 3.0});
  CHECK(wd[0] == -2.0);
  CHECK(wd[1] == 3.0);
}

TEST_CASE("tangent_project agrees with the finite difference of project") {
  SplitMix64 rng(31);
  const double delta = 1e-6;
  for (int trial = 0; trial < 500; ++trial) {
    const int dim = rng.uniform_int(1, 3);
    const ConvexSet set = random_set(rng, dim);
    Vec x = boundary_point(rng, set);
    x = set.project(x);  // exact membership
    const Vec v = random_vec(rng, dim, -2.0, 2.0);
    const Vec w = set.tangent_project(x, v);
    Vec shifted(dim);
    for (int k = 0; k < dim; ++k) shifted[k] = x[k] + delta * v[k];
    const Vec fd_p = set.project(shifted);
    for (int k = 0; k < dim; ++k) {
      const double fd = (fd_p[k] - x[k]) / delta;
      CHECK(std::abs(fd - w[k]) <= 1e-4);
    }
  }
}

TEST_CASE("tangent_project: cone-projection optimality") {
  SplitMix64 rng(613);
  for (int trial = 0; trial < 400; ++trial) {
    const int dim = rng.uniform_int(1, 3);
    const ConvexSet set = random_set(rng, dim);
    Vec x = set.project(boundary_point(rng, set));
    const Vec v = random_vec(rng, dim, -2.0, 2.0);
    const Vec w = set.tangent_project(x, v);
    const Vec residual = sub(v, w);
    CHECK(dot(residual, w) >= -1e-9);
    // Tangent directions from feasible differences: w' = y - x, y in set.
    for (int s = 0; s < 10; ++s) {
      const Vec y = interior_point(rng, set);
      CHECK(dot(residual, sub(y, x)) <= 1e-9 * (1.0 + norm2(sub(y, x))));
    }
  }
}

TEST_CASE("normal_residual: named examples") {
  const auto box = ConvexSet::box({0.0}, {1.0});
  CHECK(box.normal_residual(Vec{1.0}, Vec{5.0}) == 0.0);   // outward at hi is normal
  CHECK(box.normal_residual(Vec{0.5}, Vec{0.2}) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(box.normal_residual(Vec{0.5}, Vec{0.0}) == 0.0);

  SplitMix64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = rng.uniform_int(1, 3);
    const ConvexSet set = random_set(rng, dim);
    const Vec x = set.project(interior_point(rng, set));
    CHECK(set.normal_residual(x, Vec(dim, 0.0)) == 0.0);
  }
  CHECK_THROWS_AS(box.normal_residual(Vec{2.0}, Vec{0.0}), std::domain_error);
}
