#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vi {

class dimension_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class non_finite_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw dimension_error(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

}  // namespace detail

// Dense real vector. Non-empty, finite entries, immutable after construction.
class Vector {
 public:
  explicit Vector(std::vector<double> entries) : data_(std::move(entries)) {
    if (data_.empty()) throw dimension_error("Vector: dimension must be at least 1");
    for (double v : data_) {
      if (!std::isfinite(v)) throw non_finite_error("Vector: non-finite entry");
    }
  }

  Vector(std::initializer_list<double> entries) : Vector(std::vector<double>(entries)) {}

  static Vector filled(std::size_t dim, double value) { return Vector(std::vector<double>(dim, value)); }
  static Vector zeros(std::size_t dim) { return filled(dim, 0.0); }

  std::size_t dim() const noexcept { return data_.size(); }
  double operator[](std::size_t i) const noexcept { return data_[i]; }
  std::span<const double> entries() const noexcept { return data_; }

  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

// Left-to-right accumulation in index order; no reassociation.
inline double dot(const Vector& u, const Vector& v) {
  detail::require_same_dim(u.dim(), v.dim(), "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) acc += u[i] * v[i];
  return acc;
}

inline double squared_norm(const Vector& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

inline double norm(const Vector& v) { return std::sqrt(squared_norm(v)); }

// a*x + y
inline Vector axpy(double a, const Vector& x, const Vector& y) {
  detail::require_same_dim(x.dim(), y.dim(), "axpy");
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = a * x[i] + y[i];
  return Vector(std::move(out));
}

// x - y, exactly equal to axpy(-1, y, x).
inline Vector subtract(const Vector& x, const Vector& y) {
  detail::require_same_dim(x.dim(), y.dim(), "subtract");
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = x[i] - y[i];
  return Vector(std::move(out));
}

inline Vector scale(double a, const Vector& x) {
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = a * x[i];
  return Vector(std::move(out));
}

inline double distance(const Vector& x, const Vector& y) {
  detail::require_same_dim(x.dim(), y.dim(), "distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace vi
