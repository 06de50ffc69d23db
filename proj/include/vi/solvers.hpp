#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "vi/diagnostics.hpp"
#include "vi/feasible_sets.hpp"
#include "vi/linalg.hpp"
#include "vi/operators.hpp"

namespace vi {

enum class Method {
  TsengAdaptive,     // self-adaptive Tseng extragradient
  TsengLinesearch,   // Tseng correction with Armijo linesearch
  TsengFixed,        // Tseng forward-backward-forward, constant step
  SubgradExtragrad,  // subgradient extragradient, constant step
  Iusem,             // Iusem's linesearch extragradient
};

inline constexpr std::array<Method, 5> kAllMethods = {
    Method::TsengAdaptive, Method::TsengLinesearch, Method::TsengFixed, Method::SubgradExtragrad,
    Method::Iusem};

inline std::string_view tag(Method m) {
  switch (m) {
    case Method::TsengAdaptive: return "tseng-adaptive";
    case Method::TsengLinesearch: return "tseng-linesearch";
    case Method::TsengFixed: return "tseng-fixed";
    case Method::SubgradExtragrad: return "subgrad-extragrad";
    case Method::Iusem: return "iusem";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : kAllMethods) {
    if (tag(m) == s) return m;
  }
  return std::nullopt;
}

inline std::string method_tag_list() {
  std::string out;
  for (Method m : kAllMethods) {
    if (!out.empty()) out += ", ";
    out += tag(m);
  }
  return out;
}

/// Raised by a step when the iteration cannot continue. `solve` turns it into
/// the report status.
class solver_error : public std::runtime_error {
 public:
  solver_error(Status status, const std::string& what) : std::runtime_error(what), status_(status) {}
  Status status() const noexcept { return status_; }

 private:
  Status status_;
};

inline constexpr double kStepsizeFloor = 1e-300;
inline constexpr int kDefaultMaxBacktracks = 100;

using XiSchedule = std::function<double(std::uint64_t)>;

// xi_n = 1 / (n + 1)^p, summable for p > 1.
inline XiSchedule power_decay_xi(double exponent) {
  return [exponent](std::uint64_t n) { return 1.0 / std::pow(static_cast<double>(n + 1), exponent); };
}

/// Non-monotone self-adaptive stepsize rule.
///
///   lambda_{n+1} = min{ mu ||z_n - w_n|| / ||F z_n - F w_n||, lambda_n + xi_n }  if F z_n != F w_n
///                = lambda_n + xi_n                                           otherwise
///
/// Because xi is summable the sequence stays below lambda_1 + sum(xi), and it
/// can rise by at most xi_n per step.
class StepsizeController {
 public:
  StepsizeController(double mu, double lambda_initial, XiSchedule xi)
      : mu_(mu), lambda_(lambda_initial), lambda_initial_(lambda_initial), xi_(std::move(xi)) {
    if (!(mu_ > 0.0 && mu_ < 1.0)) throw std::invalid_argument("StepsizeController: mu must lie in (0,1)");
    if (!(lambda_initial_ > 0.0)) throw std::invalid_argument("StepsizeController: lambda1 must be positive");
    if (!xi_) throw std::invalid_argument("StepsizeController: empty xi schedule");
  }

  double mu() const noexcept { return mu_; }
  double lambda() const noexcept { return lambda_; }
  double lambda_initial() const noexcept { return lambda_initial_; }
  double xi_partial_sum() const noexcept { return xi_partial_sum_; }
  double ceiling() const noexcept { return lambda_initial_ + xi_partial_sum_; }
  double xi(std::uint64_t n) const { return xi_(n); }

  double update(std::uint64_t n, double iterate_gap, double operator_gap) {
    const double xi_n = xi_(n);
    if (!(xi_n >= 0.0) || !std::isfinite(xi_n)) {
      throw std::invalid_argument("StepsizeController: xi_n must be finite and nonnegative");
    }
    const double relaxed = lambda_ + xi_n;
    lambda_ = operator_gap > 0.0 ? std::min(mu_ * iterate_gap / operator_gap, relaxed) : relaxed;
    xi_partial_sum_ += xi_n;
    return lambda_;
  }

  double update(std::uint64_t n, const Vector& z, const Vector& w, const Vector& Fz, const Vector& Fw) {
    return update(n, distance(z, w), distance(Fz, Fw));
  }

 private:
  double mu_;
  double lambda_;
  double lambda_initial_;
  XiSchedule xi_;
  double xi_partial_sum_ = 0.0;
};

inline double update_stepsize(StepsizeController& ctrl, std::uint64_t n, const Vector& z, const Vector& w,
                              const Vector& Fz, const Vector& Fw) {
  return ctrl.update(n, z, w, Fz, Fw);
}

struct AdaptiveParams {
  double mu = 0.3;
  double lambda1 = 0.01;
  double xi_exponent = 1.1;
  XiSchedule xi;  // overrides xi_exponent when set
};

struct LinesearchParams {
  double gamma = 0.1;
  double l = 0.5;
  double mu = 0.8;
  int max_backtracks = kDefaultMaxBacktracks;
};

struct FixedStepParams {
  double lambda = 1e-3;
};

struct SolverConfig {
  double epsilon = 0.0;  // Step-1 termination scale of the adaptive method
  double tolerance = 1e-8;
  std::uint64_t max_iter = 5000;
  bool record_history = false;
  AdaptiveParams tseng_adaptive;
  LinesearchParams tseng_linesearch;
  FixedStepParams tseng_fixed;
  FixedStepParams subgrad_extragrad;
  LinesearchParams iusem;

  void validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("SolverConfig: " + what); };
    if (!(tolerance > 0.0)) fail("tolerance must be positive");
    if (!(epsilon >= 0.0)) fail("epsilon must be nonnegative");
    if (!(epsilon < tolerance)) fail("epsilon must be smaller than tolerance");
    if (max_iter < 1) fail("max_iter must be at least 1");
    if (!(tseng_adaptive.mu > 0.0 && tseng_adaptive.mu < 1.0)) fail("tseng-adaptive mu must lie in (0,1)");
    if (!(tseng_adaptive.lambda1 > 0.0)) fail("tseng-adaptive lambda1 must be positive");
    if (!tseng_adaptive.xi && !(tseng_adaptive.xi_exponent > 1.0)) {
      fail("tseng-adaptive xi_exponent must exceed 1");
    }
    for (const auto* ls : {&tseng_linesearch, &iusem}) {
      if (!(ls->gamma > 0.0)) fail("linesearch gamma must be positive");
      if (!(ls->l > 0.0 && ls->l < 1.0)) fail("linesearch l must lie in (0,1)");
      if (!(ls->mu > 0.0 && ls->mu < 1.0)) fail("linesearch mu must lie in (0,1)");
      if (ls->max_backtracks < 0) fail("linesearch max_backtracks must be nonnegative");
    }
    for (const auto* fx : {&tseng_fixed, &subgrad_extragrad}) {
      if (!(fx->lambda > 0.0)) fail("fixed stepsize must be positive");
    }
  }
};

struct SolverState {
  std::uint64_t n = 1;
  Vector z;
  std::optional<Vector> w;
  double lambda = 0.0;
  std::uint64_t num_projections = 0;
  std::uint64_t num_evals = 0;
};

/// Outcome of one iteration n.
///
/// When `terminated` is false, `state` holds z_{n+1}, lambda_{n+1} and n+1.
/// When true, `state` still holds iteration n and its w_n solves the problem
/// to the method's own termination test. Either way `state.w` is w_n,
/// `residual` is E_n = ||z_n - w_n|| / lambda_used and `lambda_used` is the
/// step that produced w_n.
struct StepResult {
  SolverState state;
  bool terminated = false;
  double residual = 0.0;
  double lambda_used = 0.0;
};

namespace detail {

// Charges the evaluations F performed since `before` to the state.
inline void charge_evals(SolverState& s, const Operator& F, std::uint64_t before) {
  s.num_evals += F.eval_count() - before;
}

inline void check_floor(double lambda) {
  if (lambda < kStepsizeFloor) {
    throw solver_error(Status::StepsizeUnderflow, "stepsize fell below " + std::to_string(kStepsizeFloor));
  }
}

}  // namespace detail

/// One iteration of the self-adaptive Tseng method.
///
///   w_n     = P_C(z_n - lambda_n F z_n)
///   stop if ||z_n - w_n|| <= lambda_n * epsilon
///   z_{n+1} = w_n + lambda_n (F z_n - F w_n)
///   lambda_{n+1} from the controller
///
/// F z_n is evaluated once and reused: one projection and two evaluations per
/// non-terminating step, one and one when the epsilon test fires.
inline StepResult tseng_adaptive_step(SolverState state, Operator& F, const FeasibleSet& C,
                                      StepsizeController& ctrl, double epsilon) {
  const std::uint64_t evals_before = F.eval_count();
  const double lambda = ctrl.lambda();
  const Vector Fz = F(state.z);
  Vector w = C.project(axpy(-lambda, Fz, state.z));
  ++state.num_projections;

  const double gap = distance(state.z, w);
  const double residual = compute_en(state.z, w, lambda);
  if (gap <= lambda * epsilon) {
    state.lambda = lambda;
    state.w = std::move(w);
    detail::charge_evals(state, F, evals_before);
    return {std::move(state), true, residual, lambda};
  }

  const Vector Fw = F(w);
  Vector next = axpy(lambda, subtract(Fz, Fw), w);
  const double next_lambda = ctrl.update(state.n, gap, distance(Fz, Fw));
  detail::charge_evals(state, F, evals_before);
  detail::check_floor(next_lambda);

  state.z = std::move(next);
  state.w = std::move(w);
  state.lambda = next_lambda;
  ++state.n;
  return {std::move(state), false, residual, lambda};
}

struct LinesearchResult {
  int m = 0;
  double step = 0.0;
  Vector w;
  Vector Fz;
  Vector Fw;
  std::uint64_t projections = 0;
};

/// Smallest m >= 0 such that, with s = gamma * l^m and w = P_C(z - s F z),
///   s ||F z - F w|| <= mu ||z - w||.
///
/// One evaluation for F z, then one projection and one evaluation per trial.
inline LinesearchResult armijo_linesearch(const Vector& z, Operator& F, const FeasibleSet& C, double gamma,
                                          double l, double mu, int max_backtracks = kDefaultMaxBacktracks) {
  if (!(gamma > 0.0)) throw std::invalid_argument("armijo_linesearch: gamma must be positive");
  if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("armijo_linesearch: l must lie in (0,1)");
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("armijo_linesearch: mu must lie in (0,1)");

  Vector Fz = F(z);
  std::uint64_t projections = 0;
  for (int m = 0; m <= max_backtracks; ++m) {
    const double step = gamma * std::pow(l, m);
    Vector w = C.project(axpy(-step, Fz, z));
    ++projections;
    Vector Fw = F(w);
    if (step * distance(Fz, Fw) <= mu * distance(z, w)) {
      return {m, step, std::move(w), std::move(Fz), std::move(Fw), projections};
    }
  }
  throw solver_error(Status::LinesearchExhausted,
                     "linesearch found no admissible step within " + std::to_string(max_backtracks) + " backtracks");
}

/// Tseng correction with a linesearch step:
///   w_n = P_C(z_n - lambda_n F z_n),  z_{n+1} = w_n - lambda_n (F w_n - F z_n)
/// F w_n from the accepted trial is reused.
inline StepResult tseng_linesearch_step(SolverState state, Operator& F, const FeasibleSet& C,
                                        const LinesearchParams& params) {
  const std::uint64_t evals_before = F.eval_count();
  LinesearchResult ls = armijo_linesearch(state.z, F, C, params.gamma, params.l, params.mu, params.max_backtracks);
  state.num_projections += ls.projections;
  detail::charge_evals(state, F, evals_before);

  const double residual = compute_en(state.z, ls.w, ls.step);
  Vector next = axpy(-ls.step, subtract(ls.Fw, ls.Fz), ls.w);
  state.z = std::move(next);
  state.w = std::move(ls.w);
  state.lambda = ls.step;
  ++state.n;
  return {std::move(state), false, residual, ls.step};
}

/// Tseng's forward-backward-forward step with a constant lambda.
inline StepResult tseng_fixed_step(SolverState state, Operator& F, const FeasibleSet& C, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("tseng_fixed_step: lambda must be positive");
  const std::uint64_t evals_before = F.eval_count();
  const Vector Fz = F(state.z);
  Vector w = C.project(axpy(-lambda, Fz, state.z));
  ++state.num_projections;
  const Vector Fw = F(w);
  detail::charge_evals(state, F, evals_before);

  const double residual = compute_en(state.z, w, lambda);
  Vector next = axpy(lambda, subtract(Fz, Fw), w);
  state.z = std::move(next);
  state.w = std::move(w);
  state.lambda = lambda;
  ++state.n;
  return {std::move(state), false, residual, lambda};
}

/// Subgradient extragradient step:
///   w_n     = P_C(z_n - lambda F z_n)
///   T_n     = {v : <z_n - lambda F z_n - w_n, v - w_n> <= 0}
///   z_{n+1} = P_{T_n}(z_n - lambda F w_n)
/// A zero normal means T_n is the whole space and P_{T_n} is the identity.
inline StepResult subgradient_extragradient_step(SolverState state, Operator& F, const FeasibleSet& C,
                                                 double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("subgradient_extragradient_step: lambda must be positive");
  const std::uint64_t evals_before = F.eval_count();
  const Vector Fz = F(state.z);
  const Vector forward = axpy(-lambda, Fz, state.z);
  Vector w = C.project(forward);
  ++state.num_projections;
  const Vector Fw = F(w);
  detail::charge_evals(state, F, evals_before);

  const double residual = compute_en(state.z, w, lambda);
  Vector normal = subtract(forward, w);
  Vector target = axpy(-lambda, Fw, state.z);
  if (squared_norm(normal) > 0.0) target = HalfSpace(std::move(normal), w).project(target);
  ++state.num_projections;

  state.z = std::move(target);
  state.w = std::move(w);
  state.lambda = lambda;
  ++state.n;
  return {std::move(state), false, residual, lambda};
}

/// Iusem's linesearch extragradient step:
///   w_n     = P_C(z_n - eta_n F z_n)        (eta_n from the linesearch)
///   lambda  = <F w_n, z_n - w_n> / ||F w_n||^2
///   z_{n+1} = P_C(z_n - lambda F w_n)
/// F w_n = 0 with w_n in C means w_n solves the problem; the step then
/// terminates with residual 0.
inline StepResult iusem_step(SolverState state, Operator& F, const FeasibleSet& C, const LinesearchParams& params) {
  const std::uint64_t evals_before = F.eval_count();
  LinesearchResult ls = armijo_linesearch(state.z, F, C, params.gamma, params.l, params.mu, params.max_backtracks);
  state.num_projections += ls.projections;
  detail::charge_evals(state, F, evals_before);

  const double fw_sq = squared_norm(ls.Fw);
  if (fw_sq == 0.0) {
    state.w = std::move(ls.w);
    state.lambda = ls.step;
    return {std::move(state), true, 0.0, ls.step};
  }

  const double residual = compute_en(state.z, ls.w, ls.step);
  const double lambda = dot(ls.Fw, subtract(state.z, ls.w)) / fw_sq;
  Vector next = C.project(axpy(-lambda, ls.Fw, state.z));
  ++state.num_projections;

  state.z = std::move(next);
  state.w = std::move(ls.w);
  state.lambda = ls.step;
  ++state.n;
  return {std::move(state), false, residual, ls.step};
}

namespace detail {

inline double initial_lambda(Method method, const SolverConfig& cfg) {
  switch (method) {
    case Method::TsengAdaptive: return cfg.tseng_adaptive.lambda1;
    case Method::TsengLinesearch: return cfg.tseng_linesearch.gamma;
    case Method::TsengFixed: return cfg.tseng_fixed.lambda;
    case Method::SubgradExtragrad: return cfg.subgrad_extragrad.lambda;
    case Method::Iusem: return cfg.iusem.gamma;
  }
  return 0.0;
}

}  // namespace detail

/// Runs `method` from z1 until E_n < tolerance, a method-specific termination
/// test fires, or max_iter iterations have run.
///
/// Step failures (stepsize underflow, exhausted linesearch, non-finite
/// iterates) end the run with the matching status; precondition violations
/// (bad config, dimension mismatch) throw before iterating. The reported
/// point is w_n of the last iteration, which lies in C. Wall time covers the
/// iteration loop only.
inline RunReport solve(Operator& F, const FeasibleSet& C, Method method, const SolverConfig& config,
                       const Vector& z1) {
  config.validate();
  detail::require_same_dim(C.dim(), z1.dim(), "solve");

  std::optional<StepsizeController> ctrl;
  if (method == Method::TsengAdaptive) {
    const auto& p = config.tseng_adaptive;
    ctrl.emplace(p.mu, p.lambda1, p.xi ? p.xi : power_decay_xi(p.xi_exponent));
  }

  RunReport report;
  if (config.record_history) report.history.emplace();
  report.final_z = z1;
  report.final_residual = std::numeric_limits<double>::infinity();

  SolverState state{1, z1, std::nullopt, detail::initial_lambda(method, config), 0, 0};
  const std::uint64_t evals_at_start = F.eval_count();
  const auto start = Clock::now();
  try {
    while (true) {
      if (state.n > config.max_iter) {
        report.status = Status::MaxIterReached;
        report.iterations = config.max_iter;
        break;
      }
      const std::uint64_t n = state.n;
      StepResult r = [&]() {
        switch (method) {
          case Method::TsengAdaptive: return tseng_adaptive_step(state, F, C, *ctrl, config.epsilon);
          case Method::TsengLinesearch: return tseng_linesearch_step(state, F, C, config.tseng_linesearch);
          case Method::TsengFixed: return tseng_fixed_step(state, F, C, config.tseng_fixed.lambda);
          case Method::SubgradExtragrad:
            return subgradient_extragradient_step(state, F, C, config.subgrad_extragrad.lambda);
          case Method::Iusem: return iusem_step(state, F, C, config.iusem);
        }
        throw std::logic_error("solve: unknown method");
      }();

      if (report.history) report.history->append(n, r.residual, r.lambda_used, seconds_since(start));
      report.num_projections = r.state.num_projections;
      report.num_evals = r.state.num_evals;
      report.final_z = *r.state.w;
      report.final_residual = r.residual;
      report.iterations = n;

      if (r.terminated || r.residual < config.tolerance) {
        report.status = Status::Converged;
        break;
      }
      state = std::move(r.state);
    }
  } catch (const solver_error& e) {
    report.status = e.status();
    report.iterations = state.n;
    report.message = e.what();
  } catch (const non_finite_error& e) {
    report.status = Status::NonFiniteIterate;
    report.iterations = state.n;
    report.message = e.what();
  }
  report.wall_time_seconds = seconds_since(start);
  report.num_evals = F.eval_count() - evals_at_start;
  return report;
}

}  // namespace vi
