#pragma once

// Euclidean projection onto the capped rotated second-order cone
//
//   X = { (x, y, z) : ||x||^2 <= y z,  y >= 0,  0 <= z <= u }
//
// for an x-block of any length m >= 1. Every input is assigned one of eight
// cases; all but the cone-boundary cases have explicit solutions, the
// cone-boundary case is resolved from the real roots of a quartic in ||x||
// (and, in addition, of a quartic in the cone multiplier).
//
// The projection depends on x-hat only through its norm and direction, so the
// work happens on the reduced triple (||x-hat||, y-hat, z-hat) and the x-block
// of the result is always a nonnegative multiple of x-hat.

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "caprsoc/poly_roots.hpp"

namespace caprsoc {

struct RsocVector {
  Eigen::VectorXd x;
  double y = 0.0;
  double z = 0.0;

  Eigen::Index block_dim() const noexcept { return x.size(); }
  bool is_finite() const noexcept;
  double squared_distance(const RsocVector& other) const;
};

class CappedRsoc {
 public:
  CappedRsoc(double cap, Eigen::Index block_dim);

  double cap() const noexcept { return cap_; }
  Eigen::Index block_dim() const noexcept { return block_dim_; }
  Eigen::Index ambient_dim() const noexcept { return block_dim_ + 2; }

 private:
  double cap_;
  Eigen::Index block_dim_;
};

enum class ProjectionCase : int {
  Member = 0,
  Origin,
  YAxis,
  CapInterior,
  CapParabola,
  ZSegment,
  ConeBoundaryQuartic,
  ConeBoundarySymmetric,
};

std::string_view to_string(ProjectionCase c) noexcept;

struct ProjectionTolerances {
  /// Absolute tolerance for the equality tests (x-hat = 0, y-hat = -z-hat,
  /// ||x-tilde|| = ||x-hat||).
  double equality = 1e-8;
  /// Slack granted to ||x||^2 <= yz and the bounds in the membership test.
  double feasibility = 1e-12;
};

struct ProjectionResult {
  RsocVector point;
  ProjectionCase kind = ProjectionCase::Member;
  /// Multiplier of ||x||^2 <= yz on the cone-boundary cases, zero elsewhere.
  double multiplier = 0.0;
  /// ||x-tilde||, set when the cap-parabola case fired.
  std::optional<double> tilde_norm;
};

bool membership(const RsocVector& v, const CappedRsoc& set, double feas_tol = 1e-12);

/// Largest violation among ||x||^2 - yz, -y, -z, z - u (zero when inside).
double infeasibility(const RsocVector& v, const CappedRsoc& set);

/// Nonnegative root of ||x||^3 + (u^2/2 - u y-hat) ||x|| - u^2 ||x-hat|| / 2,
/// the norm of the cap-parabola foot point. Solved with the cubic solver.
double tilde_x_norm(double xhat_norm, double yhat, const CappedRsoc& set);

/// The same quantity through the nested-radical formula, evaluated in complex
/// arithmetic. Kept as a cross-check for tilde_x_norm().
double tilde_x_norm_radical(double xhat_norm, double yhat, double cap);

/// Quartic in r = ||x|| whose roots hold the cone-boundary candidates.
QuarticPoly norm_quartic(double xhat_norm, double yhat, double zhat);

/// Quartic in the cone multiplier lambda for the same candidates.
QuarticPoly multiplier_quartic(double xhat_norm, double yhat, double zhat);

ProjectionCase classify(const RsocVector& v, const CappedRsoc& set, const ProjectionTolerances& tol = {});

/// Feasible points on { ||x||^2 = yz, y > 0, 0 < z < u } built from the
/// nonnegative roots r <= ||x-hat|| of norm_quartic(), or the single
/// closed-form point when y-hat = -z-hat. Requires x-hat != 0.
std::vector<RsocVector> cone_boundary_candidates(const RsocVector& v, const CappedRsoc& set,
                                                 const ProjectionTolerances& tol = {});

/// Same, from the roots lambda >= 0 of multiplier_quartic(); lambda = 2 is
/// skipped. May return an empty list.
std::vector<RsocVector> lambda_quartic_candidates(const RsocVector& v, const CappedRsoc& set,
                                                  const ProjectionTolerances& tol = {});

ProjectionResult project(const RsocVector& v, const CappedRsoc& set, const ProjectionTolerances& tol = {});

/// Elementwise project(); `threads > 1` splits the batch into contiguous
/// chunks, the output does not depend on it.
std::vector<ProjectionResult> project_cartesian(std::span<const RsocVector> batch, const CappedRsoc& set,
                                                unsigned threads = 1, const ProjectionTolerances& tol = {});

/// Allocation-free projection of one block held in caller storage.
ProjectionCase project_in_place(std::span<double> x, double& y, double& z, double cap,
                                const ProjectionTolerances& tol = {});

namespace detail {

/// Projection of the reduced point; the x-block of the answer is
/// x_scale * x-hat.
struct ReducedProjection {
  double x_scale = 0.0;
  double y = 0.0;
  double z = 0.0;
  ProjectionCase kind = ProjectionCase::Member;
  double multiplier = 0.0;
  double tilde_norm = -1.0;  // negative when unset
};

ReducedProjection project_reduced(double xhat_sq_norm, double yhat, double zhat, double cap,
                                  const ProjectionTolerances& tol);

/// Cone-boundary point with ||x|| = r for the given data: y - z is fixed by the
/// stationarity conditions, y z = r^2 by the active cone constraint.
struct BoundaryPoint {
  double r = 0.0;
  double y = 0.0;
  double z = 0.0;
  double multiplier = 0.0;
};

BoundaryPoint boundary_point(double xhat_norm, double yhat, double zhat, double r);

}  // namespace detail

}  // namespace caprsoc
