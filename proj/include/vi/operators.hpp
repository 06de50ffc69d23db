#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vi/linalg.hpp"

namespace vi {

/// The map F of a variational inequality, with an evaluation counter.
///
/// An Operator instance is per-run state: the counter is not synchronized and
/// runs must not share one. The wrapped map must be deterministic.
class Operator {
 public:
  using Map = std::function<Vector(const Vector&)>;

  explicit Operator(Map map) : map_(std::move(map)) {
    if (!map_) throw std::invalid_argument("Operator: empty map");
  }

  Vector operator()(const Vector& z) {
    ++evals_;
    return map_(z);
  }

  std::uint64_t eval_count() const noexcept { return evals_; }

 private:
  Map map_;
  std::uint64_t evals_ = 0;
};

/// F(z) = (||z|| + 1/(||z|| + theta)) z.
///
/// Pseudomonotone with S = {0}, uniformly continuous on bounded sets but not
/// Lipschitz on the whole space. These properties are documented, not checked.
inline Vector eval_example41(const Vector& z, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("eval_example41: theta must be positive");
  const double r = norm(z);
  return scale(r + 1.0 / (r + theta), z);
}

struct Example41Operator {
  double theta = 1.0;

  explicit Example41Operator(double t) : theta(t) {
    if (!(theta > 0.0)) throw std::invalid_argument("Example41Operator: theta must be positive");
  }

  Vector operator()(const Vector& z) const { return eval_example41(z, theta); }
};

// Row-major dense square matrix.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t n, std::vector<double> row_major) : n_(n), data_(std::move(row_major)) {
    if (n_ == 0 || data_.size() != n_ * n_) {
      throw dimension_error("DenseMatrix: expected n*n entries for a square matrix");
    }
  }

  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
    for (const auto& row : rows) {
      if (row.size() != n_) throw dimension_error("DenseMatrix: rows must all have n entries");
      data_.insert(data_.end(), row.begin(), row.end());
    }
    if (n_ == 0) throw dimension_error("DenseMatrix: empty matrix");
  }

  static DenseMatrix identity(std::size_t n) {
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1.0;
    return {n, std::move(d)};
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * n_ + c]; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

inline Vector eval_affine(const Vector& z, const DenseMatrix& m, const Vector& q) {
  detail::require_same_dim(m.size(), q.dim(), "eval_affine");
  detail::require_same_dim(m.size(), z.dim(), "eval_affine");
  std::vector<double> out(q.dim());
  for (std::size_t r = 0; r < m.size(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m.size(); ++c) acc += m(r, c) * z[c];
    out[r] = acc + q[r];
  }
  return Vector(std::move(out));
}

/// F(z) = Mz + q. Monotone iff M + M^T is positive semidefinite.
struct AffineOperator {
  DenseMatrix matrix;
  Vector shift;

  AffineOperator(DenseMatrix m, Vector q) : matrix(std::move(m)), shift(std::move(q)) {
    detail::require_same_dim(matrix.size(), shift.dim(), "AffineOperator");
  }

  Vector operator()(const Vector& z) const { return eval_affine(z, matrix, shift); }
};

inline Operator make_example41(double theta) { return Operator(Example41Operator(theta)); }

inline Operator make_affine(DenseMatrix m, Vector q) {
  return Operator(AffineOperator(std::move(m), std::move(q)));
}

}  // namespace vi
