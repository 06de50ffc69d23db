#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vi/linalg.hpp"

namespace vi {

// E_n = ||z - w|| / lambda
inline double compute_en(const Vector& z, const Vector& w, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("compute_en: lambda must be positive");
  return norm(subtract(z, w)) / lambda;
}

struct TraceRow {
  std::uint64_t n = 0;
  double en = 0.0;
  double lambda = 0.0;
  double elapsed_seconds = 0.0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// Per-iteration convergence history. Iteration indices strictly increase and
/// elapsed time never decreases.
class HistoryTrace {
 public:
  void append(std::uint64_t n, double en, double lambda, double elapsed_seconds) {
    if (!rows_.empty()) {
      if (n <= rows_.back().n) {
        throw std::invalid_argument("HistoryTrace: iteration index " + std::to_string(n) +
                                    " does not follow " + std::to_string(rows_.back().n));
      }
      if (elapsed_seconds < rows_.back().elapsed_seconds) {
        throw std::invalid_argument("HistoryTrace: elapsed time went backwards");
      }
    }
    if (en < 0.0) throw std::invalid_argument("HistoryTrace: negative residual");
    if (!(lambda > 0.0)) throw std::invalid_argument("HistoryTrace: nonpositive stepsize");
    if (elapsed_seconds < 0.0) throw std::invalid_argument("HistoryTrace: negative elapsed time");
    rows_.push_back({n, en, lambda, elapsed_seconds});
  }

  const std::vector<TraceRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

 private:
  std::vector<TraceRow> rows_;
};

inline HistoryTrace append_trace(HistoryTrace trace, std::uint64_t n, double en, double lambda,
                                 double elapsed_seconds) {
  trace.append(n, en, lambda, elapsed_seconds);
  return trace;
}

enum class Status {
  Converged,
  MaxIterReached,
  StepsizeUnderflow,
  ZeroDenominator,
  LinesearchExhausted,
  NonFiniteIterate,
};

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::MaxIterReached: return "max_iter_reached";
    case Status::StepsizeUnderflow: return "stepsize_underflow";
    case Status::ZeroDenominator: return "zero_denominator";
    case Status::LinesearchExhausted: return "linesearch_exhausted";
    case Status::NonFiniteIterate: return "non_finite_iterate";
  }
  return "unknown";
}

struct RunReport {
  Status status = Status::MaxIterReached;
  std::uint64_t iterations = 0;
  std::uint64_t num_projections = 0;
  std::uint64_t num_evals = 0;
  double wall_time_seconds = 0.0;
  std::optional<Vector> final_z;
  double final_residual = 0.0;
  std::optional<HistoryTrace> history;
  std::string message;
};

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace vi
