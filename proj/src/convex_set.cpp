#include "dra/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dra {

namespace {

constexpr double kMemberTol = 1e-9;

// Scale-aware activity test for a halfspace a.x <= b (slack measured against 1+|b|).
bool halfspace_active(const Halfspace& h, std::span<const double> x) {
  return h.b - dot(h.a, x) <= 1e-9 * (1.0 + std::abs(h.b));
}

// Projects `point` onto the polyhedron {a_k . y <= b_k} by enumerating
// candidate active sets. Each subset of up to `dim` halfspaces defines an
// equality-constrained least-squares candidate
//   y = point - A_S^T (A_S A_S^T)^{-1} (A_S point - b_S);
// the feasible candidate nearest to `point` is the projection. Subsets with a
// singular Gram matrix are skipped: any minimizer they could produce is
// already produced by an independent subset. Exact at the scales used here
// (<= 4 halfspaces, dim <= 3).
Vec project_polyhedron(const std::vector<Halfspace>& hs, std::span<const double> point, int dim) {
  const int k = static_cast<int>(hs.size());
  Vec best;
  double best_d2 = std::numeric_limits<double>::infinity();
  Vec cand(dim);
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::vector<int> sel;
    for (int j = 0; j < k; ++j)
      if (mask & (1u << j)) sel.push_back(j);
    if (static_cast<int>(sel.size()) > dim) continue;

    if (sel.empty()) {
      std::copy(point.begin(), point.end(), cand.begin());
    } else {
      const int s = static_cast<int>(sel.size());
      Mat gram(s, s);
      Vec rhs(s);
      for (int r = 0; r < s; ++r) {
        const auto& hr = hs[sel[r]];
        rhs[r] = dot(hr.a, point) - hr.b;
        for (int c = 0; c < s; ++c) gram(r, c) = dot(hr.a, hs[sel[c]].a);
      }
      Vec w;
      if (!solve_linear(gram, rhs, w)) continue;
      std::copy(point.begin(), point.end(), cand.begin());
      for (int r = 0; r < s; ++r)
        for (int c = 0; c < dim; ++c) cand[c] -= w[r] * hs[sel[r]].a[c];
    }

    bool feasible = true;
    for (const auto& h : hs) {
      // Slack scales with the data so large inputs (e.g. cone projection of a
      // long direction vector) do not fail on least-squares roundoff.
      const double slack = 1e-10 * (1.0 + std::abs(h.b) + std::abs(dot(h.a, point)));
      if (dot(h.a, cand) > h.b + slack) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    double d2 = 0.0;
    for (int c = 0; c < dim; ++c) {
      const double diff = cand[c] - point[c];
      d2 += diff * diff;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best = cand;
    }
  }
  if (best.empty()) throw std::logic_error("polyhedron projection found no feasible candidate");
  return best;
}

}  // namespace

ConvexSet ConvexSet::full_space(int dim) {
  if (dim <= 0) throw std::invalid_argument("ConvexSet: dimension must be positive");
  ConvexSet s;
  s.kind_ = Kind::FullSpace;
  s.dim_ = dim;
  return s;
}

ConvexSet ConvexSet::box(Vec lo, Vec hi) {
  if (lo.empty() || lo.size() != hi.size()) throw std::invalid_argument("ConvexSet: box bounds size mismatch");
  for (size_t i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i]) || lo[i] > hi[i])
      throw std::invalid_argument("ConvexSet: box requires lo <= hi");
  }
  ConvexSet s;
  s.kind_ = Kind::Box;
  s.dim_ = static_cast<int>(lo.size());
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

ConvexSet ConvexSet::ball(Vec center, double radius) {
  if (center.empty()) throw std::invalid_argument("ConvexSet: ball center empty");
  if (!(radius > 0.0)) throw std::invalid_argument("ConvexSet: ball radius must be positive");
  ConvexSet s;
  s.kind_ = Kind::Ball;
  s.dim_ = static_cast<int>(center.size());
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

ConvexSet ConvexSet::polyhedron(std::vector<Halfspace> halfspaces, Vec interior_point) {
  if (halfspaces.empty()) throw std::invalid_argument("ConvexSet: polyhedron needs at least one halfspace");
  const int dim = static_cast<int>(interior_point.size());
  if (dim == 0) throw std::invalid_argument("ConvexSet: polyhedron interior point empty");
  for (const auto& h : halfspaces) {
    if (static_cast<int>(h.a.size()) != dim) throw std::invalid_argument("ConvexSet: halfspace dimension mismatch");
    if (norm2(h.a) <= 0.0) throw std::invalid_argument("ConvexSet: halfspace normal must be nonzero");
    if (!(dot(h.a, interior_point) < h.b))
      throw std::invalid_argument("ConvexSet: interior point is not strictly interior");
  }
  ConvexSet s;
  s.kind_ = Kind::Polyhedron;
  s.dim_ = dim;
  s.hs_ = std::move(halfspaces);
  s.witness_ = std::move(interior_point);
  return s;
}

void ConvexSet::require_dim(size_t got, const char* what) const {
  if (static_cast<int>(got) != dim_) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

void ConvexSet::require_member(std::span<const double> x, const char* what) const {
  if (!contains(x, kMemberTol)) throw std::domain_error(std::string(what) + ": point is not in the set");
}

bool ConvexSet::contains(std::span<const double> x, double tol) const {
  require_dim(x.size(), "contains");
  if (tol < 0) throw std::invalid_argument("contains: negative tolerance");
  switch (kind_) {
    case Kind::FullSpace:
      return true;
    case Kind::Box:
      for (int i = 0; i < dim_; ++i)
        if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
      return true;
    case Kind::Ball: {
      double d2 = 0.0;
      for (int i = 0; i < dim_; ++i) d2 += (x[i] - center_[i]) * (x[i] - center_[i]);
      return std::sqrt(d2) <= radius_ + tol;
    }
    case Kind::Polyhedron:
      for (const auto& h : hs_)
        if (dot(h.a, x) > h.b + tol) return false;
      return true;
  }
  return false;
}

void ConvexSet::project_into(std::span<const double> x, std::span<double> out) const {
  require_dim(x.size(), "project");
  switch (kind_) {
    case Kind::FullSpace:
      std::copy(x.begin(), x.end(), out.begin());
      return;
    case Kind::Box:
      for (int i = 0; i < dim_; ++i) out[i] = std::min(std::max(x[i], lo_[i]), hi_[i]);
      return;
    case Kind::Ball: {
      double d2 = 0.0;
      for (int i = 0; i < dim_; ++i) d2 += (x[i] - center_[i]) * (x[i] - center_[i]);
      const double d = std::sqrt(d2);
      if (d <= radius_) {
        std::copy(x.begin(), x.end(), out.begin());
      } else {
        const double scale = radius_ / d;
        for (int i = 0; i < dim_; ++i) out[i] = center_[i] + scale * (x[i] - center_[i]);
      }
      return;
    }
    case Kind::Polyhedron: {
      Vec r = project_polyhedron(hs_, x, dim_);
      std::copy(r.begin(), r.end(), out.begin());
      return;
    }
  }
}

Vec ConvexSet::project(std::span<const double> x) const {
  Vec out(dim_);
  project_into(x, out);
  return out;
}

void ConvexSet::tangent_project_into(std::span<const double> x, std::span<const double> v,
                                     std::span<double> out) const {
  require_dim(x.size(), "tangent_project");
  require_dim(v.size(), "tangent_project");
  require_member(x, "tangent_project");
  switch (kind_) {
    case Kind::FullSpace:
      std::copy(v.begin(), v.end(), out.begin());
      return;
    case Kind::Box:
      for (int i = 0; i < dim_; ++i) {
        const bool lo_active = std::isfinite(lo_[i]) && x[i] - lo_[i] <= 1e-9 * (1.0 + std::abs(lo_[i]));
        const bool hi_active = std::isfinite(hi_[i]) && hi_[i] - x[i] <= 1e-9 * (1.0 + std::abs(hi_[i]));
        double w = v[i];
        if (lo_active && w < 0.0) w = 0.0;
        if (hi_active && w > 0.0) w = 0.0;
        out[i] = w;
      }
      return;
    case Kind::Ball: {
      double d2 = 0.0;
      for (int i = 0; i < dim_; ++i) d2 += (x[i] - center_[i]) * (x[i] - center_[i]);
      const double d = std::sqrt(d2);
      const bool boundary = std::abs(d - radius_) <= 1e-9 * (1.0 + radius_);
      if (!boundary || d == 0.0) {
        std::copy(v.begin(), v.end(), out.begin());
        return;
      }
      double vn = 0.0;
      for (int i = 0; i < dim_; ++i) vn += v[i] * (x[i] - center_[i]) / d;
      if (vn <= 0.0) {
        std::copy(v.begin(), v.end(), out.begin());
      } else {
        for (int i = 0; i < dim_; ++i) out[i] = v[i] - vn * (x[i] - center_[i]) / d;
      }
      return;
    }
    case Kind::Polyhedron: {
      std::vector<Halfspace> active;
      for (const auto& h : hs_)
        if (halfspace_active(h, x)) active.push_back({h.a, 0.0});
      if (active.empty()) {
        std::copy(v.begin(), v.end(), out.begin());
        return;
      }
      // Tangent cone of a polyhedron: directions satisfying the active
      // constraints homogeneously. Reuse the polyhedron projector with b = 0.
      Vec r = project_polyhedron(active, v, dim_);
      std::copy(r.begin(), r.end(), out.begin());
      return;
    }
  }
}

Vec ConvexSet::tangent_project(std::span<const double> x, std::span<const double> v) const {
  Vec out(dim_);
  tangent_project_into(x, v, out);
  return out;
}

double ConvexSet::normal_residual(std::span<const double> x, std::span<const double> v) const {
  require_dim(x.size(), "normal_residual");
  require_dim(v.size(), "normal_residual");
  require_member(x, "normal_residual");
  Vec shifted(dim_);
  for (int i = 0; i < dim_; ++i) shifted[i] = x[i] + v[i];
  Vec p = project(shifted);
  double d2 = 0.0;
  for (int i = 0; i < dim_; ++i) d2 += (p[i] - x[i]) * (p[i] - x[i]);
  return std::sqrt(d2);
}

double ConvexSet::distance(std::span<const double> x) const {
  Vec p = project(x);
  double d2 = 0.0;
  for (int i = 0; i < dim_; ++i) d2 += (p[i] - x[i]) * (p[i] - x[i]);
  return std::sqrt(d2);
}

const Vec& ConvexSet::lower() const {
  if (kind_ != Kind::Box) throw std::logic_error("lower: not a box");
  return lo_;
}
const Vec& ConvexSet::upper() const {
  if (kind_ != Kind::Box) throw std::logic_error("upper: not a box");
  return hi_;
}
const Vec& ConvexSet::center() const {
  if (kind_ != Kind::Ball) throw std::logic_error("center: not a ball");
  return center_;
}
double ConvexSet::radius() const {
  if (kind_ != Kind::Ball) throw std::logic_error("radius: not a ball");
  return radius_;
}
const std::vector<Halfspace>& ConvexSet::halfspaces() const {
  if (kind_ != Kind::Polyhedron) throw std::logic_error("halfspaces: not a polyhedron");
  return hs_;
}
const Vec& ConvexSet::interior_point() const {
  if (kind_ != Kind::Polyhedron) throw std::logic_error("interior_point: not a polyhedron");
  return witness_;
}

}  // namespace dra
