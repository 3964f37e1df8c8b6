#pragma once

// Slow reference solvers for the projection onto the capped cone, sharing no
// code with the closed form.
//
// By rotation invariance of the set the optimal x-block is a nonnegative
// multiple of x-hat, and for fixed (y, z) the best multiple is explicit:
// ||x|| = min(||x-hat||, sqrt(yz)). What remains is a strongly convex function
// of (y, z) on a box, minimised here by coarse-to-fine grid search.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "caprsoc/rsoc_projection.hpp"

namespace caprsoc {

struct OracleConfig {
  int grid_init = 64;
  int refine_rounds = 8;
  double target_cell = 1e-7;
  double y_max_factor = 2.0;
};

/// Reduced objective (||x-hat|| - r)^2 + (y - y-hat)^2 + (z - z-hat)^2 with the
/// best feasible r for this (y, z).
double oracle_reduced_objective(double xhat_norm, double yhat, double zhat, double y, double z) noexcept;

RsocVector oracle_project(const RsocVector& v, const CappedRsoc& set, const OracleConfig& cfg = {});

/// Deterministic members of the set (membership holds with zero tolerance).
/// Every batch starts with the origin, a point on the y-axis, (0, 0, u) and a
/// cap-parabola point, as far as `count` allows.
std::vector<RsocVector> sample_feasible(const CappedRsoc& set, std::size_t count, std::uint64_t seed);

/// max over w of (v - p).(w - p), with w drawn from sample_feasible(), the
/// recession direction along y, and structured boundary points in the plane
/// spanned by x-hat. Nonpositive up to rounding exactly when p = P(v).
/// Throws InvalidArgument when p is not feasible within 1e-9.
double projection_certificate(const RsocVector& v, const RsocVector& p, const CappedRsoc& set,
                              std::size_t samples, std::uint64_t seed);

}  // namespace caprsoc
