#pragma once

// Seeded random instances shared by the property tests and the acceptance
// suite.

#include <cmath>
#include <random>
#include <vector>

#include "vi/feasible_sets.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline std::vector<double> uniform(Rng& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline vi::Vector vec(Rng& rng, std::size_t n, double lo, double hi) { return vi::Vector(uniform(rng, n, lo, hi)); }

inline vi::BoxSet box(Rng& rng, std::size_t n) {
  auto a = uniform(rng, n, -2.0, 2.0);
  auto b = uniform(rng, n, -2.0, 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] > b[i]) std::swap(a[i], b[i]);
  }
  return {vi::Vector(a), vi::Vector(b)};
}

inline vi::BallSet ball(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> r(0.1, 3.0);
  return {vec(rng, n, -1.0, 1.0), r(rng)};
}

inline vi::HalfSpace halfspace(Rng& rng, std::size_t n) {
  std::vector<double> a;
  do {
    a = uniform(rng, n, -1.0, 1.0);
  } while (vi::norm(vi::Vector(a)) < 1e-3);
  return {vi::Vector(a), vec(rng, n, -1.0, 1.0)};
}

// A point inside the set, not just on its boundary.
inline vi::Vector inside(Rng& rng, const vi::BoxSet& s) {
  std::vector<double> u(s.dim());
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = s.lower()[i] + t(rng) * (s.upper()[i] - s.lower()[i]);
  return vi::Vector(u);
}

inline vi::Vector inside(Rng& rng, const vi::BallSet& s) {
  std::normal_distribution<double> g;
  std::vector<double> d(s.dim());
  for (auto& x : d) x = g(rng);
  const double len = vi::norm(vi::Vector(d));
  std::uniform_real_distribution<double> t(0.0, 1.0);
  const double r = s.radius() * std::pow(t(rng), 1.0 / static_cast<double>(s.dim()));
  return vi::axpy(r / len, vi::Vector(d), s.center());
}

inline vi::Vector inside(Rng& rng, const vi::HalfSpace& s) {
  vi::Vector v = vec(rng, s.dim(), -5.0, 5.0);
  const double excess = s.violation(v);
  if (excess > 0.0) v = vi::axpy(-2.0 * excess / vi::squared_norm(s.normal()), s.normal(), v);
  return v;
}

}  // namespace gen
