#include "caprsoc/solvers.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "caprsoc/error.hpp"

namespace caprsoc {
namespace {

constexpr int kMaxTrials = 200;
constexpr double kResolution = 1e-14;

DecisionPoint step_from(const DecisionPoint& w, const DecisionPoint& g, double s) {
  return {w.x - s * g.x, w.y - s * g.y, w.z - s * g.z};
}

double sq_dist(const DecisionPoint& a, const DecisionPoint& b) {
  return (a.x - b.x).squaredNorm() + (a.y - b.y).squaredNorm() + (a.z - b.z).squaredNorm();
}

double sq_norm(const DecisionPoint& a) { return a.x.squaredNorm() + a.y.squaredNorm() + a.z.squaredNorm(); }

bool same(const DecisionPoint& a, const DecisionPoint& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

DecisionPoint projected(const SparseRegressionProblem& p, DecisionPoint w) {
  project_point(p, w);
  return w;
}

class Clock {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double resolve_lipschitz(const SparseRegressionProblem& p, const SolverConfig& cfg) {
  const double L = cfg.L ? *cfg.L : lipschitz_estimate(p, cfg.lipschitz_iters, cfg.seed);
  // A zero design has no curvature; any positive constant is a valid bound.
  return L > 0.0 ? L : 1.0;
}

bool should_stop(const StoppingRule& rule, const TraceRow& row, Termination& why) {
  switch (rule.mode) {
    case StopMode::ObjectiveTarget:
      if (row.f - *rule.target <= *rule.rel_gap * std::abs(*rule.target)) {
        why = Termination::TargetReached;
        return true;
      }
      return false;
    case StopMode::FixedPointResidual:
      if (row.residual <= *rule.residual_tol) {
        why = Termination::ResidualReached;
        return true;
      }
      return false;
    case StopMode::MaxIter:
      return false;
  }
  return false;
}

// Shared driver: `advance` produces the next iterate and the step used.
template <class Advance>
SolveReport run(const SparseRegressionProblem& p, const SolverConfig& cfg, double L, Advance&& advance) {
  const Clock clock;
  SolveReport rep;
  rep.lipschitz = L;
  DecisionPoint w = DecisionPoint::zeros(p);
  double f = objective(p, w);
  rep.trace.push_back({0, f, 0.0, fixed_point_residual(p, w, 1.0 / L), clock.ms()});
  rep.reason = Termination::MaxIter;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    double step = 0.0;
    bool stationary = false;
    DecisionPoint next = advance(w, f, step, stationary);
    f = objective(p, next);
    w = std::move(next);
    TraceRow row{k, f, step, fixed_point_residual(p, w, 1.0 / L), 0.0};
    row.time_ms = clock.ms();
    rep.trace.push_back(row);
    rep.iterations = k;
    if (should_stop(cfg.stop, row, rep.reason)) break;
    if (stationary) {
      rep.reason = Termination::Stationary;
      break;
    }
  }
  rep.objective = f;
  rep.residual = rep.trace.back().residual;
  rep.point = std::move(w);
  rep.time_ms = clock.ms();
  return rep;
}

}  // namespace

std::string_view to_string(Method m) noexcept { return m == Method::PG ? "pg" : "fista"; }
std::string_view to_string(StepMode m) noexcept { return m == StepMode::Constant ? "const" : "backtrack"; }
std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::TargetReached: return "target_reached";
    case Termination::ResidualReached: return "residual_reached";
    case Termination::MaxIter: return "max_iter";
    case Termination::Stationary: return "stationary";
  }
  return "unknown";
}

void validate(const SolverConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (!(cfg.beta_pg > 0.0 && cfg.beta_pg < 1.0)) fail(ErrorCode::InvalidArgument, "beta_pg must lie in (0, 1)");
  if (!(cfg.beta_fista > 1.0)) fail(ErrorCode::InvalidArgument, "beta_fista must exceed 1");
  if (cfg.s0 && !(*cfg.s0 > 0.0)) fail(ErrorCode::InvalidArgument, "s0 must be positive");
  if (cfg.L && !(*cfg.L > 0.0)) fail(ErrorCode::InvalidArgument, "L must be positive");
  if (cfg.max_iter < 0) fail(ErrorCode::InvalidArgument, "max_iter must be nonnegative");
  if (cfg.lipschitz_iters < 1) fail(ErrorCode::InvalidArgument, "lipschitz_iters must be at least 1");
  const StoppingRule& r = cfg.stop;
  if (r.mode == StopMode::ObjectiveTarget && (!r.target || !r.rel_gap || !(*r.rel_gap >= 0.0)))
    fail(ErrorCode::InvalidArgument, "objective-target stop needs a target and a nonnegative rel_gap");
  if (r.mode == StopMode::FixedPointResidual && (!r.residual_tol || !(*r.residual_tol > 0.0)))
    fail(ErrorCode::InvalidArgument, "residual stop needs a positive residual_tol");
}

double fixed_point_residual(const SparseRegressionProblem& p, const DecisionPoint& w, double s) {
  if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "residual step must be positive");
  const DecisionPoint next = projected(p, step_from(w, gradient(p, w), s));
  return std::sqrt(sq_dist(w, next)) / (1.0 + std::sqrt(sq_norm(w)));
}

double default_pg_s0(const SparseRegressionProblem& p) {
  const Eigen::MatrixXd Q = 2.0 * (p.A.transpose() * p.A);
  const double s0 = static_cast<double>(p.n()) * Q.cwiseAbs().maxCoeff();
  return s0 > 0.0 ? s0 : 1.0;
}

LinesearchResult pg_linesearch(const SparseRegressionProblem& p, const DecisionPoint& w, double f_w,
                               const DecisionPoint& grad, double s0, double alpha, double beta) {
  if (!(s0 > 0.0)) fail(ErrorCode::InvalidArgument, "s0 must be positive");
  LinesearchResult res;
  double s = s0;
  for (int j = 0; j <= kMaxTrials; ++j, s *= beta) {
    res.point = projected(p, step_from(w, grad, s));
    res.f_point = objective(p, res.point);
    res.trials = j + 1;
    const double required = alpha / s * sq_dist(w, res.point);
    if (f_w - res.f_point >= required) {
      res.step = s;
      return res;
    }
    // The demanded decrease is below what f can resolve: w is stationary to
    // working precision. Stay put rather than accept a rounding increase.
    if (required <= kResolution * std::max(1.0, std::abs(f_w))) {
      res.step = s;
      res.point = w;
      res.f_point = f_w;
      res.stalled = true;
      return res;
    }
  }
  fail(ErrorCode::StepFailure, "projected-gradient linesearch found no sufficient decrease in 200 steps");
}

// For this objective f(P) - f(w) - (P - w).grad f(w) equals ||A (P_x - w_x)||^2
// exactly, so the majorisation test is evaluated in that form: it needs no
// difference of two large objective values and is immune to cancellation once
// the iterates settle.
LinesearchResult fista_linesearch(const SparseRegressionProblem& p, const DecisionPoint& w,
                                  const DecisionPoint& grad, double s0, double beta) {
  if (!(s0 > 0.0)) fail(ErrorCode::InvalidArgument, "s0 must be positive");
  LinesearchResult res;
  double s = s0;
  for (int j = 0; j <= kMaxTrials; ++j, s *= beta) {
    res.point = projected(p, step_from(w, grad, 1.0 / s));
    res.trials = j + 1;
    const double curvature = (p.A * (res.point.x - w.x)).squaredNorm();
    if (curvature <= 0.5 * s * sq_dist(res.point, w)) {
      res.step = s;
      res.f_point = objective(p, res.point);
      return res;
    }
  }
  fail(ErrorCode::StepFailure, "FISTA linesearch found no majorising step in 200 steps");
}

SolveReport projected_gradient(const SparseRegressionProblem& p, const SolverConfig& cfg) {
  validate(p);
  validate(cfg);
  const double L = resolve_lipschitz(p, cfg);
  const bool backtrack = cfg.step_mode == StepMode::Backtracking;
  const double s0 = cfg.s0 ? *cfg.s0 : default_pg_s0(p);
  return run(p, cfg, L, [&](const DecisionPoint& w, double f_w, double& step, bool& stationary) {
    const DecisionPoint g = gradient(p, w);
    DecisionPoint next;
    if (backtrack) {
      LinesearchResult ls = pg_linesearch(p, w, f_w, g, s0, cfg.alpha, cfg.beta_pg);
      step = ls.step;
      next = std::move(ls.point);
    } else {
      step = 1.0 / L;
      next = projected(p, step_from(w, g, step));
      // With s = 1/L the descent lemma guarantees a decrease of (L/2)||d||^2;
      // an increase is rounding once that bound is below the resolution of f.
      const double guaranteed = 0.5 * L * sq_dist(w, next);
      if (objective(p, next) > f_w && guaranteed <= kResolution * std::max(1.0, std::abs(f_w))) next = w;
    }
    stationary = same(next, w);
    return next;
  });
}

SolveReport fista(const SparseRegressionProblem& p, const SolverConfig& cfg) {
  validate(p);
  validate(cfg);
  const double L = resolve_lipschitz(p, cfg);
  const bool backtrack = cfg.step_mode == StepMode::Backtracking;
  double s = cfg.s0 ? *cfg.s0 : 1.0;
  double t = 1.0;
  DecisionPoint y = DecisionPoint::zeros(p);
  return run(p, cfg, L, [&](const DecisionPoint& w_prev, double, double& step, bool& stationary) {
    const DecisionPoint g = gradient(p, y);
    DecisionPoint w;
    if (backtrack) {
      LinesearchResult ls = fista_linesearch(p, y, g, s, cfg.beta_fista);
      s = ls.step;
      step = 1.0 / s;
      w = std::move(ls.point);
    } else {
      step = 1.0 / L;
      w = projected(p, step_from(y, g, step));
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double mom = (t - 1.0) / t_next;
    stationary = same(w, w_prev) && same(w, y);
    y = {w.x + mom * (w.x - w_prev.x), w.y + mom * (w.y - w_prev.y), w.z + mom * (w.z - w_prev.z)};
    t = t_next;
    return w;
  });
}

SolveReport solve(const SparseRegressionProblem& p, const SolverConfig& cfg) {
  return cfg.method == Method::PG ? projected_gradient(p, cfg) : fista(p, cfg);
}

SolveReport solve_grouped(const SparseRegressionProblem& p, const SolverConfig& cfg) {
  if (!p.groups) fail(ErrorCode::InvalidArgument, "grouped solve needs a partition");
  return solve(p, cfg);
}

void write_trace_csv(std::ostream& out, const SolveReport& report) {
  out << "k,f,step,residual,time_ms\n";
  out << std::setprecision(17);
  for (const TraceRow& r : report.trace)
    out << r.k << ',' << r.f << ',' << r.step << ',' << r.residual << ',' << r.time_ms << '\n';
}

}  // namespace caprsoc
