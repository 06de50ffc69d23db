#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "vi/linalg.hpp"
#include "vi/operators.hpp"

namespace vi {

// Per-coordinate bounds lower_i <= x_i <= upper_i.
class BoxSet {
 public:
  BoxSet(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    detail::require_same_dim(lower_.dim(), upper_.dim(), "BoxSet");
    for (std::size_t i = 0; i < lower_.dim(); ++i) {
      if (lower_[i] > upper_[i]) throw std::invalid_argument("BoxSet: lower bound exceeds upper bound");
    }
  }

  std::size_t dim() const noexcept { return lower_.dim(); }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }

  Vector project(const Vector& z) const {
    detail::require_same_dim(dim(), z.dim(), "BoxSet::project");
    std::vector<double> out(z.dim());
    for (std::size_t i = 0; i < z.dim(); ++i) out[i] = std::clamp(z[i], lower_[i], upper_[i]);
    return Vector(std::move(out));
  }

  bool contains(const Vector& z, double tol) const {
    detail::require_same_dim(dim(), z.dim(), "BoxSet::contains");
    for (std::size_t i = 0; i < z.dim(); ++i) {
      if (z[i] < lower_[i] - tol || z[i] > upper_[i] + tol) return false;
    }
    return true;
  }

 private:
  Vector lower_;
  Vector upper_;
};

class BallSet {
 public:
  BallSet(Vector center, double radius) : center_(std::move(center)), radius_(radius) {
    if (!(radius_ > 0.0)) throw std::invalid_argument("BallSet: radius must be positive");
  }

  std::size_t dim() const noexcept { return center_.dim(); }
  const Vector& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }

  Vector project(const Vector& z) const {
    detail::require_same_dim(dim(), z.dim(), "BallSet::project");
    const Vector offset = subtract(z, center_);
    const double r = norm(offset);
    if (r <= radius_) return z;
    return axpy(radius_ / r, offset, center_);
  }

  bool contains(const Vector& z, double tol) const {
    detail::require_same_dim(dim(), z.dim(), "BallSet::contains");
    return distance(z, center_) - radius_ <= tol;
  }

 private:
  Vector center_;
  double radius_;
};

// {v : <normal, v - anchor> <= 0}
class HalfSpace {
 public:
  HalfSpace(Vector normal, Vector anchor) : normal_(std::move(normal)), anchor_(std::move(anchor)) {
    detail::require_same_dim(normal_.dim(), anchor_.dim(), "HalfSpace");
    normal_sq_ = squared_norm(normal_);
    if (!(normal_sq_ > 0.0)) throw std::invalid_argument("HalfSpace: normal must be nonzero");
  }

  std::size_t dim() const noexcept { return normal_.dim(); }
  const Vector& normal() const noexcept { return normal_; }
  const Vector& anchor() const noexcept { return anchor_; }

  double violation(const Vector& z) const { return dot(normal_, subtract(z, anchor_)); }

  Vector project(const Vector& z) const {
    detail::require_same_dim(dim(), z.dim(), "HalfSpace::project");
    const double excess = violation(z);
    if (excess <= 0.0) return z;
    Vector p = axpy(-excess / normal_sq_, normal_, z);
    // Rounding can leave p a few ulps outside; push it onto the feasible side so
    // that projecting again is the identity.
    double push = 1.0;
    for (int k = 0; k < 64; ++k) {
      const double rest = violation(p);
      if (rest <= 0.0) break;
      p = axpy(-push * rest / normal_sq_, normal_, p);
      push *= 2.0;
    }
    return p;
  }

  // Compares the Euclidean distance to the boundary, not the raw inner product.
  bool contains(const Vector& z, double tol) const {
    detail::require_same_dim(dim(), z.dim(), "HalfSpace::contains");
    return violation(z) / std::sqrt(normal_sq_) <= tol;
  }

 private:
  Vector normal_;
  Vector anchor_;
  double normal_sq_ = 0.0;
};

/// A closed convex set with an exact metric projection.
class FeasibleSet {
 public:
  using Variant = std::variant<BoxSet, BallSet, HalfSpace>;

  FeasibleSet(BoxSet s) : set_(std::move(s)) {}
  FeasibleSet(BallSet s) : set_(std::move(s)) {}
  FeasibleSet(HalfSpace s) : set_(std::move(s)) {}

  std::size_t dim() const {
    return std::visit([](const auto& s) { return s.dim(); }, set_);
  }

  Vector project(const Vector& z) const {
    return std::visit([&](const auto& s) { return s.project(z); }, set_);
  }

  bool contains(const Vector& z, double tol = 0.0) const {
    return std::visit([&](const auto& s) { return s.contains(z, tol); }, set_);
  }

  const Variant& variant() const noexcept { return set_; }

 private:
  Variant set_;
};

inline Vector project(const FeasibleSet& set, const Vector& z) { return set.project(z); }

inline bool contains(const FeasibleSet& set, const Vector& z, double tol) {
  if (tol < 0.0) throw std::invalid_argument("contains: tolerance must be nonnegative");
  return set.contains(z, tol);
}

// C = {x : -1/j <= x_j <= 1/j}, j = 1..m
inline BoxSet example41_box(std::size_t m) {
  if (m == 0) throw std::invalid_argument("example41_box: m must be at least 1");
  std::vector<double> lo(m), hi(m);
  for (std::size_t j = 0; j < m; ++j) {
    hi[j] = 1.0 / static_cast<double>(j + 1);
    lo[j] = -hi[j];
  }
  return {Vector(std::move(lo)), Vector(std::move(hi))};
}

/// e(z, alpha) = z - P_C(z - alpha F(z)).
///
/// Costs one evaluation of F (counted by F itself) and one projection, which is
/// added to `projections`.
inline Vector natural_residual(const Vector& z, double alpha, Operator& F, const FeasibleSet& C,
                               std::uint64_t& projections) {
  if (!(alpha > 0.0)) throw std::invalid_argument("natural_residual: alpha must be positive");
  const Vector Fz = F(z);
  const Vector projected = C.project(axpy(-alpha, Fz, z));
  ++projections;
  return subtract(z, projected);
}

}  // namespace vi
