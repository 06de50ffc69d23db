#pragma once

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "vi/diagnostics.hpp"
#include "vi/feasible_sets.hpp"
#include "vi/operators.hpp"
#include "vi/solvers.hpp"

namespace vi::bench {

class spec_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BenchmarkSpec {
  std::string problem = "example41";
  std::vector<std::size_t> dims;
  std::vector<double> thetas;
  std::vector<Method> algorithms;
  std::uint64_t repeats = 20;
  std::string output_dir;
  SolverConfig solver;  // tolerance, max_iter and per-algorithm blocks
};

struct SummaryRow {
  std::size_t m = 0;
  double theta = 0.0;
  Method algorithm = Method::TsengAdaptive;
  std::uint64_t iter = 0;
  std::uint64_t num_pc = 0;
  std::uint64_t num_f = 0;
  double cpu_time_mean_seconds = 0.0;
  Status status = Status::Converged;
};

struct BenchmarkResult {
  std::vector<SummaryRow> rows;
  std::map<std::string, HistoryTrace> traces;  // keyed by run_key
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

inline double parse_real(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty() || !std::isfinite(v)) {
    throw spec_error("key '" + std::string(key) + "': expected a real number, got '" + std::string(text) + "'");
  }
  return v;
}

inline std::uint64_t parse_count(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw spec_error("key '" + std::string(key) + "': expected a nonnegative integer, got '" + std::string(text) + "'");
  }
  return v;
}

inline double parse_positive(std::string_view key, std::string_view text) {
  const double v = parse_real(key, text);
  if (!(v > 0.0)) throw spec_error("key '" + std::string(key) + "': must be positive");
  return v;
}

inline double parse_open_unit(std::string_view key, std::string_view text) {
  const double v = parse_real(key, text);
  if (!(v > 0.0 && v < 1.0)) throw spec_error("key '" + std::string(key) + "': must lie in (0,1)");
  return v;
}

inline std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace detail

/// Applies one `key = value` assignment to `spec`. Throws spec_error naming
/// the key on unknown keys or ill-typed values.
inline void apply_setting(BenchmarkSpec& spec, std::string_view key, std::string_view value) {
  using namespace detail;
  auto& cfg = spec.solver;

  if (key == "problem") {
    if (value != "example41") throw spec_error("key 'problem': unknown problem '" + std::string(value) + "' (valid: example41)");
    spec.problem = std::string(value);
  } else if (key == "dims") {
    spec.dims.clear();
    for (auto item : split_list(value)) {
      const auto m = parse_count(key, item);
      if (m == 0) throw spec_error("key 'dims': dimensions must be positive");
      spec.dims.push_back(static_cast<std::size_t>(m));
    }
  } else if (key == "thetas") {
    spec.thetas.clear();
    for (auto item : split_list(value)) spec.thetas.push_back(parse_positive(key, item));
  } else if (key == "algorithms") {
    spec.algorithms.clear();
    for (auto item : split_list(value)) {
      if (item.empty()) continue;
      auto m = parse_method(item);
      if (!m) {
        throw spec_error("key 'algorithms': unknown algorithm '" + std::string(item) + "' (valid: " + method_tag_list() + ")");
      }
      spec.algorithms.push_back(*m);
    }
  } else if (key == "tolerance") {
    cfg.tolerance = parse_positive(key, value);
  } else if (key == "max_iter") {
    cfg.max_iter = parse_count(key, value);
    if (cfg.max_iter == 0) throw spec_error("key 'max_iter': must be at least 1");
  } else if (key == "repeats") {
    spec.repeats = parse_count(key, value);
    if (spec.repeats == 0) throw spec_error("key 'repeats': must be at least 1");
  } else if (key == "output_dir") {
    spec.output_dir = std::string(value);
  } else if (key == "alg.tseng-adaptive.mu") {
    cfg.tseng_adaptive.mu = parse_open_unit(key, value);
  } else if (key == "alg.tseng-adaptive.lambda1") {
    cfg.tseng_adaptive.lambda1 = parse_positive(key, value);
  } else if (key == "alg.tseng-adaptive.xi_exponent") {
    cfg.tseng_adaptive.xi_exponent = parse_real(key, value);
    if (!(cfg.tseng_adaptive.xi_exponent > 1.0)) throw spec_error("key '" + std::string(key) + "': must exceed 1");
  } else if (key.starts_with("alg.")) {
    const auto rest = key.substr(4);
    const auto dot = rest.rfind('.');
    const auto method = dot == std::string_view::npos ? std::nullopt : parse_method(rest.substr(0, dot));
    const auto field = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
    LinesearchParams* ls = nullptr;
    FixedStepParams* fixed = nullptr;
    if (method == Method::TsengLinesearch) ls = &cfg.tseng_linesearch;
    if (method == Method::Iusem) ls = &cfg.iusem;
    if (method == Method::TsengFixed) fixed = &cfg.tseng_fixed;
    if (method == Method::SubgradExtragrad) fixed = &cfg.subgrad_extragrad;

    if (ls && field == "gamma") {
      ls->gamma = parse_positive(key, value);
    } else if (ls && field == "l") {
      ls->l = parse_open_unit(key, value);
    } else if (ls && field == "mu") {
      ls->mu = parse_open_unit(key, value);
    } else if (ls && field == "max_backtracks") {
      ls->max_backtracks = static_cast<int>(std::min<std::uint64_t>(parse_count(key, value), 100000));
    } else if (fixed && field == "lambda") {
      fixed->lambda = parse_positive(key, value);
    } else {
      throw spec_error("unknown key '" + std::string(key) + "'");
    }
  } else {
    throw spec_error("unknown key '" + std::string(key) + "'");
  }
}

/// Checks the cross-key requirements once all settings are in.
inline void validate_spec(const BenchmarkSpec& spec) {
  if (spec.dims.empty()) throw spec_error("key 'dims': missing or empty");
  if (spec.thetas.empty()) throw spec_error("key 'thetas': missing or empty");
  if (spec.algorithms.empty()) throw spec_error("key 'algorithms': missing or empty (valid: " + method_tag_list() + ")");
  if (spec.repeats == 0) throw spec_error("key 'repeats': must be at least 1");
  try {
    spec.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw spec_error(e.what());
  }
}

/// Parses the flat key-value format: one `key = value` per line, `#` starts a
/// comment, lists are comma separated. Defaults: tolerance 1e-8, max_iter
/// 5000, repeats 20.
inline BenchmarkSpec parse_spec(std::string_view text) {
  BenchmarkSpec spec;
  std::set<std::string, std::less<>> seen;
  bool has_problem = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw spec_error("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw spec_error("line " + std::to_string(line_no) + ": empty key");
    if (!seen.emplace(key).second) throw spec_error("key '" + std::string(key) + "': given more than once");
    apply_setting(spec, key, value);
    has_problem = has_problem || key == "problem";
  }
  if (!has_problem) throw spec_error("key 'problem': missing");
  validate_spec(spec);
  return spec;
}

inline BenchmarkSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw spec_error("cannot read spec file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

struct Problem {
  Operator op;
  FeasibleSet set;
  Vector start;
};

// Example 4.1 in R^m, started from (1, ..., 1).
inline Problem make_example41_problem(std::size_t m, double theta) {
  return {make_example41(theta), FeasibleSet(example41_box(m)), Vector::filled(m, 1.0)};
}

inline std::string run_key(std::size_t m, double theta, Method alg) {
  return "m" + std::to_string(m) + "_theta" + detail::format_g(theta, 6) + "_" + std::string(tag(alg));
}

/// Matrix concurrency from VI_SOLVE_THREADS, defaulting to the number of
/// logical processors.
inline unsigned thread_budget() {
  unsigned fallback = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("VI_SOLVE_THREADS");
  if (!env || !*env) return fallback;
  const std::string_view text(env);
  unsigned v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || v == 0) {
    throw spec_error("VI_SOLVE_THREADS must be a positive integer, got '" + std::string(text) + "'");
  }
  return v;
}

/// Runs every (m, theta, algorithm) cell of the matrix.
///
/// Each cell gets one traced run that supplies the counters and the trace,
/// then `repeats` untraced runs whose wall times are averaged. Runs are
/// deterministic, so the counters carry over to the timed runs. Cells may run
/// concurrently; the timed runs of one cell stay on one thread. Rows come back
/// sorted by (m, theta, algorithm order).
inline BenchmarkResult run_benchmark(const BenchmarkSpec& spec, unsigned threads = 0) {
  validate_spec(spec);
  if (threads == 0) threads = thread_budget();

  struct Cell {
    std::size_t m;
    double theta;
    Method alg;
  };
  std::vector<Cell> cells;
  for (auto m : spec.dims) {
    for (auto theta : spec.thetas) {
      for (auto alg : spec.algorithms) cells.push_back({m, theta, alg});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return std::tuple(a.m, a.theta, static_cast<int>(a.alg)) < std::tuple(b.m, b.theta, static_cast<int>(b.alg));
  });
  cells.erase(std::unique(cells.begin(), cells.end(),
                          [](const Cell& a, const Cell& b) { return a.m == b.m && a.theta == b.theta && a.alg == b.alg; }),
              cells.end());

  std::vector<SummaryRow> rows(cells.size());
  std::vector<std::optional<HistoryTrace>> traces(cells.size());

  auto run_cell = [&](std::size_t i) {
    const Cell& c = cells[i];
    SolverConfig traced = spec.solver;
    traced.record_history = true;
    auto problem = make_example41_problem(c.m, c.theta);
    RunReport ref = solve(problem.op, problem.set, c.alg, traced, problem.start);

    SolverConfig timed = spec.solver;
    timed.record_history = false;
    double total = 0.0;
    for (std::uint64_t r = 0; r < spec.repeats; ++r) {
      auto fresh = make_example41_problem(c.m, c.theta);
      total += solve(fresh.op, fresh.set, c.alg, timed, fresh.start).wall_time_seconds;
    }

    rows[i] = {c.m, c.theta, c.alg, ref.iterations, ref.num_projections, ref.num_evals,
               total / static_cast<double>(spec.repeats), ref.status};
    traces[i] = std::move(ref.history);
  };

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        run_cell(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  BenchmarkResult result;
  result.rows = std::move(rows);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (traces[i]) result.traces.emplace(run_key(cells[i].m, cells[i].theta, cells[i].alg), std::move(*traces[i]));
  }
  return result;
}

inline constexpr std::string_view kSummaryHeader = "m,theta,algorithm,iter,num_pc,num_f,cpu_time_s";
inline constexpr std::string_view kTraceHeader = "n,E_n,lambda_n,elapsed_s";

inline std::string render_summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out(kSummaryHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.m) + ',' + detail::format_g(r.theta, 6) + ',' + std::string(tag(r.algorithm)) + ',' +
           std::to_string(r.iter) + ',' + std::to_string(r.num_pc) + ',' + std::to_string(r.num_f) + ',' +
           detail::format_g(r.cpu_time_mean_seconds, 6) + '\n';
  }
  return out;
}

// Residuals and stepsizes are printed round-trip exact.
inline std::string render_trace_csv(const HistoryTrace& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& row : trace.rows()) {
    out += std::to_string(row.n) + ',' + detail::format_g(row.en, 17) + ',' + detail::format_g(row.lambda, 17) + ',' +
           detail::format_g(row.elapsed_seconds, 9) + '\n';
  }
  return out;
}

inline void emit_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  detail::write_file(path, render_summary_csv(rows));
}

inline void emit_trace_csv(const HistoryTrace& trace, const std::filesystem::path& path) {
  detail::write_file(path, render_trace_csv(trace));
}

}  // namespace vi::bench
