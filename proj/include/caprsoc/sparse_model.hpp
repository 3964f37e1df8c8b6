#pragma once

// Perspective relaxation of L0+L2 regression:
//
//   min  ||A x||^2 - 2 b^T A x + gamma1 sum z + gamma2 sum y
//   s.t. (x_G, y_i, z_i) in X (cap u) for every group G_i.
//
// Without groups every coordinate is its own group. The constant ||b||^2 is
// left out of the objective.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "caprsoc/rsoc_projection.hpp"

namespace caprsoc {

using Partition = std::vector<std::vector<Eigen::Index>>;

struct SparseRegressionProblem {
  Eigen::MatrixXd A;  // t x n
  Eigen::VectorXd b;  // t
  double gamma1 = 0.5;
  double gamma2 = 0.5;
  double cap = 1.0;
  std::optional<Partition> groups;

  Eigen::Index n() const noexcept { return A.cols(); }
  Eigen::Index t() const noexcept { return A.rows(); }
  /// Number of (y, z) pairs.
  Eigen::Index q() const noexcept { return groups ? static_cast<Eigen::Index>(groups->size()) : A.cols(); }
};

struct DecisionPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd z;

  static DecisionPoint zeros(const SparseRegressionProblem& p);
};

/// Dimensions, penalties, cap and partition.
void validate(const SparseRegressionProblem& p);

/// Every index in [0, n) exactly once, no empty group.
void validate_partition(const Partition& groups, Eigen::Index n);

/// q groups of consecutive columns, n / q each, the remainder going to the
/// last group.
Partition consecutive_groups(Eigen::Index n, Eigen::Index q);

double objective(const SparseRegressionProblem& p, const DecisionPoint& w);
DecisionPoint gradient(const SparseRegressionProblem& p, const DecisionPoint& w);

/// 2 sigma_max(A)^2 from power iteration on A^T A, times 1.01.
double lipschitz_estimate(const SparseRegressionProblem& p, int iters = 200, std::uint64_t seed = 0);

/// |x| on [-1, 1], (x^2 + 1)/2 outside.
double reverse_huber(double x) noexcept;

struct InnerMinimum {
  double y = 0.0;
  double z = 0.0;
  double value = 0.0;  // gamma1 z + gamma2 y
};

/// argmin of gamma1 z + gamma2 y over (x, y, z) in X with u = 1, x fixed.
InnerMinimum inner_minimize(double x, double gamma1, double gamma2);

/// ||A x||^2 - 2 b^T A x + 2 gamma1 sum B(sqrt(gamma2/gamma1) x_i), the
/// objective with (y, z) minimised out. Ungrouped problems with u = 1 only.
double reduced_objective(const SparseRegressionProblem& p, const Eigen::VectorXd& x);

/// (x_G, y_i, z_i) for every group, in group order.
std::vector<RsocVector> group_blocks(const SparseRegressionProblem& p, const DecisionPoint& w);

/// Projects w onto the product set, block by block, in place.
void project_point(const SparseRegressionProblem& p, DecisionPoint& w, const ProjectionTolerances& tol = {});

bool point_is_feasible(const SparseRegressionProblem& p, const DecisionPoint& w, double feas_tol = 1e-12);

struct SynthOptions {
  Eigen::Index t = 100;
  Eigen::Index n = 200;
  Eigen::Index sparsity = 10;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

/// Gaussian design, +-1 planted coefficients on `sparsity` random columns,
/// b = A x + noise * N(0, 1). Penalties default to 0.5.
SparseRegressionProblem synth_instance(const SynthOptions& opt);

}  // namespace caprsoc
