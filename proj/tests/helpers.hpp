#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "dra/convex_set.hpp"
#include "dra/problem.hpp"
#include "dra/rng.hpp"

namespace dra::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline Vec random_vec(SplitMix64& rng, int dim, double lo, double hi) {
  Vec v(dim);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

// A random set of any variant, dimension 1..3. Polyhedra are built around a
// witness point so they are never empty; some box bounds come out infinite.
inline ConvexSet random_set(SplitMix64& rng, int dim) {
  switch (rng.uniform_int(0, 3)) {
    case 0:
      return ConvexSet::full_space(dim);
    case 1: {
      Vec lo(dim), hi(dim);
      for (int k = 0; k < dim; ++k) {
        lo[k] = rng.next_double() < 0.15 ? -kInf : rng.uniform(-5.0, 1.0);
        hi[k] = rng.next_double() < 0.15 ? kInf : std::max(std::isfinite(lo[k]) ? lo[k] : -5.0, -5.0) +
                                                      rng.uniform(0.2, 6.0);
      }
      return ConvexSet::box(std::move(lo), std::move(hi));
    }
    case 2:
      return ConvexSet::ball(random_vec(rng, dim, -3.0, 3.0), rng.uniform(0.3, 4.0));
    default: {
      Vec witness = random_vec(rng, dim, -2.0, 2.0);
      const int count = rng.uniform_int(1, 4);
      std::vector<Halfspace> hs;
      for (int c = 0; c < count; ++c) {
        Vec a(dim);
        double nrm = 0.0;
        do {
          a = random_vec(rng, dim, -1.0, 1.0);
          nrm = norm2(a);
        } while (nrm < 1e-3);
        hs.push_back({a, dot(a, witness) + rng.uniform(0.1, 2.0)});
      }
      return ConvexSet::polyhedron(std::move(hs), std::move(witness));
    }
  }
}

// A point on (or numerically at) the boundary of the set, paired with the set.
inline Vec boundary_point(SplitMix64& rng, const ConvexSet& set) {
  const int dim = set.dim();
  switch (set.kind()) {
    case ConvexSet::Kind::FullSpace:
      return random_vec(rng, dim, -2.0, 2.0);  // no boundary; interior point
    case ConvexSet::Kind::Box: {
      Vec x(dim);
      bool pinned = false;
      for (int k = 0; k < dim; ++k) {
        const double lo = set.lower()[k], hi = set.upper()[k];
        const double lo_f = std::isfinite(lo) ? lo : -6.0;
        const double hi_f = std::isfinite(hi) ? hi : 6.0;
        const int which = rng.uniform_int(0, 2);
        if (which == 0 && std::isfinite(lo)) {
          x[k] = lo;
          pinned = true;
        } else if (which == 1 && std::isfinite(hi)) {
          x[k] = hi;
          pinned = true;
        } else {
          x[k] = rng.uniform(lo_f, hi_f);
        }
      }
      if (!pinned) {
        for (int k = 0; k < dim; ++k) {
          if (std::isfinite(set.upper()[k])) {
            x[k] = set.upper()[k];
            break;
          }
          if (std::isfinite(set.lower()[k])) {
            x[k] = set.lower()[k];
            break;
          }
        }
      }
      return x;
    }
    case ConvexSet::Kind::Ball: {
      Vec dir = random_vec(rng, dim, -1.0, 1.0);
      double nrm = norm2(dir);
      if (nrm < 1e-6) {
        dir.assign(dim, 0.0);
        dir[0] = 1.0;
        nrm = 1.0;
      }
      Vec x(dim);
      for (int k = 0; k < dim; ++k) x[k] = set.center()[k] + set.radius() * dir[k] / nrm;
      return x;
    }
    case ConvexSet::Kind::Polyhedron: {
      // Walk from the witness along a random ray to the nearest facet.
      const Vec& w = set.interior_point();
      for (int attempt = 0; attempt < 64; ++attempt) {
        Vec dir = random_vec(rng, dim, -1.0, 1.0);
        if (norm2(dir) < 1e-6) continue;
        double tmin = kInf;
        for (const auto& h : set.halfspaces()) {
          const double ad = dot(h.a, dir);
          if (ad > 1e-12) tmin = std::min(tmin, (h.b - dot(h.a, w)) / ad);
        }
        if (!std::isfinite(tmin)) continue;
        Vec x(dim);
        for (int k = 0; k < dim; ++k) x[k] = w[k] + tmin * dir[k];
        return x;
      }
      return w;  // unbounded in every sampled direction
    }
  }
  return Vec(dim, 0.0);
}

// A random point strictly inside the set.
inline Vec interior_point(SplitMix64& rng, const ConvexSet& set) {
  const int dim = set.dim();
  switch (set.kind()) {
    case ConvexSet::Kind::FullSpace:
      return random_vec(rng, dim, -3.0, 3.0);
    case ConvexSet::Kind::Box: {
      Vec x(dim);
      for (int k = 0; k < dim; ++k) {
        const double lo = std::isfinite(set.lower()[k]) ? set.lower()[k] : -6.0;
        const double hi = std::isfinite(set.upper()[k]) ? set.upper()[k] : 6.0;
        const double pad = 0.05 * (hi - lo);
        x[k] = rng.uniform(lo + pad, hi - pad);
      }
      return x;
    }
    case ConvexSet::Kind::Ball: {
      Vec dir = random_vec(rng, dim, -1.0, 1.0);
      const double nrm = std::max(norm2(dir), 1e-9);
      const double r = set.radius() * rng.uniform(0.0, 0.85);
      Vec x(dim);
      for (int k = 0; k < dim; ++k) x[k] = set.center()[k] + r * dir[k] / nrm;
      return x;
    }
    case ConvexSet::Kind::Polyhedron: {
      // Shrink a boundary walk back toward the witness.
      Vec b = boundary_point(rng, set);
      const Vec& w = set.interior_point();
      const double f = rng.uniform(0.0, 0.8);
      Vec x(dim);
      for (int k = 0; k < dim; ++k) x[k] = w[k] + f * (b[k] - w[k]);
      return x;
    }
  }
  return Vec(dim, 0.0);
}

// Random m=1 allocation problem with scalar quadratic costs and boxes, built
// so the clearing price stays moderate and the optimum mixes interior agents
// with agents pinned decisively at a bound (no near-kink degeneracy, which
// would slow the tail of the dynamics). sum d is strictly inside
// (sum lo, sum hi).
inline ProblemInstance random_dispatch_problem(SplitMix64& rng, int n_lo = 3, int n_hi = 10) {
  ProblemInstance p;
  p.m = 1;
  const int n = rng.uniform_int(n_lo, n_hi);
  const double price_target = rng.uniform(-3.0, 3.0);

  struct Draw {
    double a, b, lo, hi, d;
    int role;  // 0: upper-pinned, 1: lower-pinned, 2: interior
  };
  std::vector<Draw> draws(n);
  // At least half the agents stay interior: the aggregate price response then
  // never drops below n/2 * 1/(2*5), which keeps the slow balance mode's rate
  // bounded away from zero over the whole family.
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);
  std::vector<int> roles(n, 2);
  for (int k = (n + 1) / 2; k < n; ++k) roles[perm[k]] = rng.next_double() < 0.5 ? 0 : 1;

  std::vector<int> interior;
  double slack_sum = 0.0;  // sum of (bound - d) signed deficits from pinned agents
  for (int i = 0; i < n; ++i) {
    Draw& g = draws[i];
    g.a = rng.uniform(0.5, 5.0);
    g.b = rng.uniform(-5.0, 5.0);
    const double x_free = (price_target - g.b) / (2.0 * g.a);
    g.role = roles[i];
    if (g.role == 0) {
      g.hi = x_free - rng.uniform(0.8, 1.6);  // wants more than its cap allows
      g.lo = g.hi - rng.uniform(0.8, 2.5);
      const double s = rng.uniform(0.05, 0.3);
      g.d = g.hi - s;
      slack_sum += s;
    } else if (g.role == 1) {
      g.lo = x_free + rng.uniform(0.8, 1.6);  // floor holds it above its free point
      g.hi = g.lo + rng.uniform(0.8, 2.5);
      const double s = rng.uniform(0.05, 0.3);
      g.d = g.lo + s;
      slack_sum -= s;
    } else {
      g.lo = x_free - rng.uniform(0.8, 3.0);
      g.hi = x_free + rng.uniform(0.8, 3.0);
      g.d = x_free;
      interior.push_back(i);
    }
  }
  // Distribute the pinned agents' deficits over the interior agents so the
  // clearing price lands exactly on price_target and the constructed active
  // set is the true one, with healthy margins on both sides.
  const double correction = slack_sum / static_cast<double>(interior.size());
  for (int i : interior) draws[i].d += correction;

  for (int i = 0; i < n; ++i) {
    const Draw& g = draws[i];
    p.agents.emplace_back(i + 1, Objective::quadratic_scalar(g.a, g.b, rng.uniform(-1.0, 1.0)),
                          Vec{g.d}, ConvexSet::box({g.lo}, {g.hi}));
  }
  p.graph = random_connected_graph(n, 0.8, rng.next_u64());
  return p;
}

}  // namespace dra::testing
