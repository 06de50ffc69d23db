// vi-solve: run variational inequality solvers on the Example 4.1 problem and
// reproduce the benchmark tables as CSV.
//
//   vi-solve bench --spec <path> --out <dir>
//   vi-solve run --problem example41 --m <int> --theta <float> --alg <tag>
//                [--tol <float>] [--max-iter <int>] [--trace <path>] [--set key=value]...
//   vi-solve list-algs
//
// Exit codes: 0 success, 1 a run did not converge or failed, 2 bad flags or spec.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vi/bench.hpp"
#include "vi/solvers.hpp"

namespace {

constexpr int kExitRunFailure = 1;
constexpr int kExitUsage = 2;

void print_row(const vi::bench::SummaryRow& r) {
  std::printf("%-8zu %-8g %-18s %6llu %8llu %8llu %12.6g  %s\n", r.m, r.theta, std::string(vi::tag(r.algorithm)).c_str(),
              static_cast<unsigned long long>(r.iter), static_cast<unsigned long long>(r.num_pc),
              static_cast<unsigned long long>(r.num_f), r.cpu_time_mean_seconds, std::string(vi::to_string(r.status)).c_str());
}

int run_bench(const std::string& spec_path, std::string out_dir) {
  vi::bench::BenchmarkSpec spec;
  try {
    spec = vi::bench::load_spec(spec_path);
    if (out_dir.empty()) out_dir = spec.output_dir;
    if (out_dir.empty()) throw vi::bench::spec_error("no output directory: pass --out or set output_dir");
    vi::bench::thread_budget();
  } catch (const std::exception& e) {
    std::cerr << "vi-solve bench: " << e.what() << '\n';
    return kExitUsage;
  }

  const std::filesystem::path out(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) {
    std::cerr << "vi-solve bench: cannot create '" << out.string() << "': " << ec.message() << '\n';
    return kExitRunFailure;
  }

  vi::bench::BenchmarkResult result;
  try {
    result = vi::bench::run_benchmark(spec);
    vi::bench::emit_summary_csv(result.rows, out / "summary.csv");
    for (const auto& [key, trace] : result.traces) vi::bench::emit_trace_csv(trace, out / ("trace_" + key + ".csv"));
  } catch (const std::exception& e) {
    std::cerr << "vi-solve bench: " << e.what() << '\n';
    return kExitRunFailure;
  }

  std::printf("%-8s %-8s %-18s %6s %8s %8s %12s  %s\n", "m", "theta", "algorithm", "iter", "num_pc", "num_f",
              "cpu_time_s", "status");
  bool all_converged = true;
  for (const auto& r : result.rows) {
    print_row(r);
    all_converged = all_converged && r.status == vi::Status::Converged;
  }
  std::printf("wrote %s\n", (out / "summary.csv").string().c_str());
  return all_converged ? 0 : kExitRunFailure;
}

struct RunOptions {
  std::string problem;
  std::size_t m = 0;
  double theta = 0.0;
  std::string alg;
  std::optional<double> tol;
  std::optional<std::uint64_t> max_iter;
  std::string trace_path;
  std::vector<std::string> settings;
};

int run_single(const RunOptions& opts) {
  vi::bench::BenchmarkSpec spec;
  std::optional<vi::Method> method;
  try {
    vi::bench::apply_setting(spec, "problem", opts.problem);
    method = vi::parse_method(opts.alg);
    if (!method) throw vi::bench::spec_error("unknown algorithm '" + opts.alg + "' (valid: " + vi::method_tag_list() + ")");
    if (opts.m == 0) throw vi::bench::spec_error("--m must be positive");
    if (!(opts.theta > 0.0)) throw vi::bench::spec_error("--theta must be positive");
    for (const auto& s : opts.settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw vi::bench::spec_error("--set expects key=value, got '" + s + "'");
      vi::bench::apply_setting(spec, vi::bench::detail::trim(std::string_view(s).substr(0, eq)),
                               vi::bench::detail::trim(std::string_view(s).substr(eq + 1)));
    }
    if (opts.tol) spec.solver.tolerance = *opts.tol;
    if (opts.max_iter) spec.solver.max_iter = *opts.max_iter;
    spec.solver.validate();
  } catch (const std::exception& e) {
    std::cerr << "vi-solve run: " << e.what() << '\n';
    return kExitUsage;
  }

  vi::SolverConfig cfg = spec.solver;
  cfg.record_history = !opts.trace_path.empty();
  auto problem = vi::bench::make_example41_problem(opts.m, opts.theta);
  const vi::RunReport report = vi::solve(problem.op, problem.set, *method, cfg, problem.start);

  std::printf("status          %s\n", std::string(vi::to_string(report.status)).c_str());
  std::printf("iterations      %llu\n", static_cast<unsigned long long>(report.iterations));
  std::printf("num_pc          %llu\n", static_cast<unsigned long long>(report.num_projections));
  std::printf("num_f           %llu\n", static_cast<unsigned long long>(report.num_evals));
  std::printf("final_residual  %.6g\n", report.final_residual);
  std::printf("wall_time_s     %.6g\n", report.wall_time_seconds);
  if (!report.message.empty()) std::printf("message         %s\n", report.message.c_str());

  if (report.history) {
    try {
      vi::bench::emit_trace_csv(*report.history, opts.trace_path);
    } catch (const std::exception& e) {
      std::cerr << "vi-solve run: " << e.what() << '\n';
      return kExitRunFailure;
    }
  }
  return report.status == vi::Status::Converged ? 0 : kExitRunFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational inequality solvers and benchmark harness"};
  app.require_subcommand(1);

  std::string spec_path, out_dir;
  auto* bench = app.add_subcommand("bench", "Run a benchmark matrix from a spec file");
  bench->add_option("--spec", spec_path, "Spec file (key = value lines)")->required();
  bench->add_option("--out", out_dir, "Output directory for summary.csv and traces");

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Solve one problem instance");
  run->add_option("--problem", run_opts.problem, "Problem tag (example41)")->required();
  run->add_option("--m", run_opts.m, "Dimension")->required();
  run->add_option("--theta", run_opts.theta, "Operator parameter theta")->required();
  run->add_option("--alg", run_opts.alg, "Algorithm tag")->required();
  run->add_option("--tol", run_opts.tol, "Stopping tolerance on E_n (default 1e-8)");
  run->add_option("--max-iter", run_opts.max_iter, "Iteration cap (default 5000)");
  run->add_option("--trace", run_opts.trace_path, "Write the convergence trace CSV here");
  run->add_option("--set", run_opts.settings, "Override a spec key, e.g. alg.tseng-adaptive.mu=0.5");

  auto* list = app.add_subcommand("list-algs", "List algorithm tags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*list) {
    for (vi::Method m : vi::kAllMethods) std::printf("%s\n", std::string(vi::tag(m)).c_str());
    return 0;
  }
  if (*bench) return run_bench(spec_path, out_dir);
  return run_single(run_opts);
}
