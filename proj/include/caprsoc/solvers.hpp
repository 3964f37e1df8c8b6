#pragma once

// Projected gradient and FISTA over the product of capped cones, with constant
// steps or backtracking.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "caprsoc/sparse_model.hpp"

namespace caprsoc {

enum class Method { PG, FISTA };
enum class StepMode { Constant, Backtracking };
enum class StopMode { ObjectiveTarget, FixedPointResidual, MaxIter };
enum class Termination { TargetReached, ResidualReached, MaxIter, Stationary };

std::string_view to_string(Method m) noexcept;
std::string_view to_string(StepMode m) noexcept;
std::string_view to_string(Termination t) noexcept;

struct StoppingRule {
  StopMode mode = StopMode::MaxIter;
  std::optional<double> target;        // reference objective
  std::optional<double> rel_gap;       // f - target <= rel_gap * |target|
  std::optional<double> residual_tol;  // fixed_point_residual(w, 1/L) <= tol
};

struct SolverConfig {
  Method method = Method::FISTA;
  StepMode step_mode = StepMode::Backtracking;
  /// Lipschitz constant for the constant step; estimated when empty.
  std::optional<double> L;
  /// Initial step (PG) or initial inverse step (FISTA). When empty PG uses
  /// n * max|2 A^T A| and FISTA uses 1.
  std::optional<double> s0;
  double alpha = 0.5;
  double beta_pg = 0.8;
  double beta_fista = 1.5;
  int max_iter = 1000;
  StoppingRule stop;
  std::uint64_t seed = 0;  // power-iteration start
  int lipschitz_iters = 200;
};

/// Throws InvalidArgument on out-of-range parameters or an inconsistent rule.
void validate(const SolverConfig& cfg);

struct TraceRow {
  int k = 0;
  double f = 0.0;
  double step = 0.0;      // actual step length taken to reach this iterate
  double residual = 0.0;  // fixed_point_residual(w^k, 1/L)
  double time_ms = 0.0;
};

struct SolveReport {
  DecisionPoint point;
  std::vector<TraceRow> trace;  // row 0 is the starting point
  double objective = 0.0;
  double residual = 0.0;
  int iterations = 0;
  Termination reason = Termination::MaxIter;
  double lipschitz = 0.0;
  double time_ms = 0.0;
};

/// ||w - P(w - s grad f(w))|| / (1 + ||w||).
double fixed_point_residual(const SparseRegressionProblem& p, const DecisionPoint& w, double s);

struct LinesearchResult {
  double step = 0.0;  // PG: step s; FISTA: inverse step s
  DecisionPoint point;
  double f_point = 0.0;
  int trials = 0;
  /// PG only: the required decrease fell below the resolution of f before the
  /// test passed; point is w itself.
  bool stalled = false;
};

/// Shrinks s = s0 beta^j until f(w) - f(P) >= (alpha/s) ||w - P||^2 with
/// P = P(w - s grad). Once (alpha/s) ||w - P||^2 drops below 1e-14 max(1, |f(w)|)
/// without the test passing, returns w unchanged with `stalled` set. More than
/// 200 shrinks throws StepFailure.
LinesearchResult pg_linesearch(const SparseRegressionProblem& p, const DecisionPoint& w, double f_w,
                               const DecisionPoint& grad, double s0, double alpha, double beta);

/// Grows s = s0 beta^j until f(P) - f(w) <= (P - w).grad + (s/2) ||P - w||^2
/// with P = P(w - grad / s). More than 200 growth steps throws StepFailure.
LinesearchResult fista_linesearch(const SparseRegressionProblem& p, const DecisionPoint& w,
                                  const DecisionPoint& grad, double s0, double beta);

/// n * max |(2 A^T A)_ij|.
double default_pg_s0(const SparseRegressionProblem& p);

/// Starts from w = 0. Both methods accept grouped problems.
SolveReport projected_gradient(const SparseRegressionProblem& p, const SolverConfig& cfg);
SolveReport fista(const SparseRegressionProblem& p, const SolverConfig& cfg);
SolveReport solve(const SparseRegressionProblem& p, const SolverConfig& cfg);
/// solve() for a problem that must carry a partition.
SolveReport solve_grouped(const SparseRegressionProblem& p, const SolverConfig& cfg);

/// Header k,f,step,residual,time_ms; full double precision.
void write_trace_csv(std::ostream& out, const SolveReport& report);

}  // namespace caprsoc
