#include "caprsoc/rsoc_projection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <thread>

#include "caprsoc/error.hpp"

namespace caprsoc {
namespace {

double sq(double a) noexcept { return a * a; }

void check_point(const RsocVector& v, const CappedRsoc& set) {
  if (v.x.size() != set.block_dim())
    fail(ErrorCode::InvalidArgument, "x-block has length " + std::to_string(v.x.size()) + ", set expects " +
                                         std::to_string(set.block_dim()));
  if (!v.is_finite()) fail(ErrorCode::InvalidArgument, "point has non-finite entries");
}

double cubic_root_norm(double X, double yhat, double u) {
  if (X == 0.0) return 0.0;
  const DepressedCubic c{0.5 * u * u - u * yhat, -0.5 * u * u * X};
  // q < 0, so w^3 + p w + q has exactly one positive root; it is the largest.
  const std::vector<double> roots = solve_depressed_cubic(c);
  const double t = roots.back();
  const double res = std::abs(t * t * t + c.p * t + c.q);
  const double scale = std::max({1.0, u * u, X, std::abs(t * t * t), std::abs(c.p * t)});
  if (!(t > 0.0) || res > 1e-9 * scale)
    fail(ErrorCode::InternalInconsistency, "cap-parabola cubic has no admissible positive root");
  return t;
}

struct Classified {
  ProjectionCase kind = ProjectionCase::Member;
  double tilde = -1.0;   // ||x-tilde|| when computed
  double c = 0.0;        // x-tilde = c * x-hat
};

Classified classify_reduced(double xsq, double yh, double zh, double u, const ProjectionTolerances& tol) {
  const double X = std::sqrt(xsq);
  const bool x_zero = X <= tol.equality;
  const double fe = tol.feasibility;

  if (xsq <= yh * zh + fe && yh >= -fe && zh >= -fe && zh <= u + fe) return {ProjectionCase::Member};
  if (yh <= 0.0 && zh <= 0.0 && xsq <= 4.0 * yh * zh && yh + zh < 0.0) return {ProjectionCase::Origin};
  if (x_zero && yh > 0.0 && zh < 0.0) return {ProjectionCase::YAxis};
  if (xsq <= u * yh && zh > u) return {ProjectionCase::CapInterior};

  Classified out;
  out.tilde = cubic_root_norm(X, yh, u);
  const double t = out.tilde;
  if (X > 0.0) out.c = u * u / (2.0 * t * t - 2.0 * u * yh + u * u);
  const double ytil = t * t / u;
  const double inner = out.c * (1.0 - out.c) * xsq;  // x-tilde . (x-hat - x-tilde)
  const bool below = zh >= u - inner / u - (ytil / u) * (yh - ytil);
  const bool side = (t < X && yh <= ytil) || (std::abs(t - X) <= tol.equality && yh < ytil);
  if (below && side) {
    out.kind = ProjectionCase::CapParabola;
    return out;
  }
  if (x_zero && yh < 0.0 && zh > 0.0 && zh < u) return {ProjectionCase::ZSegment, out.tilde, out.c};
  out.kind = std::abs(yh + zh) <= tol.equality ? ProjectionCase::ConeBoundarySymmetric
                                               : ProjectionCase::ConeBoundaryQuartic;
  return out;
}

// Keeps a boundary point if it lies on the cone face strictly inside the
// bounds; z may overshoot the cap by rounding, then it is pulled back.
bool admit(detail::BoundaryPoint& p, double X, double u) {
  if (!(p.r > 0.0) || p.r > X * (1.0 + 1e-12)) return false;
  if (!(p.y > 0.0) || !(p.z > 0.0) || !std::isfinite(p.y) || !std::isfinite(p.z)) return false;
  if (p.z > u * (1.0 + 1e-12)) return false;
  if (p.z > u) {
    p.z = u;
    p.y = std::max(p.y, p.r * p.r / u);
  }
  if (std::abs(p.r * p.r - p.y * p.z) > 1e-8 * std::max(1.0, p.r * p.r)) return false;
  return true;
}

void from_norm_quartic(double X, double yh, double zh, double u, std::vector<detail::BoundaryPoint>& out) {
  for (double r : solve_quartic(norm_quartic(X, yh, zh))) {
    auto p = detail::boundary_point(X, yh, zh, r);
    if (admit(p, X, u)) out.push_back(p);
  }
}

void from_multiplier_quartic(double X, double yh, double zh, double u, double eq_tol,
                             std::vector<detail::BoundaryPoint>& out) {
  const QuarticPoly qp = multiplier_quartic(X, yh, zh);
  const double cmax = std::max({std::abs(qp.c3), std::abs(qp.c2), std::abs(qp.c1), std::abs(qp.c0)});
  std::vector<double> roots;
  if (std::abs(qp.c4) > 1e-14 * cmax) {
    roots = solve_quartic(qp);
  } else {
    const std::array<double, 5> c{qp.c4, qp.c3, qp.c2, qp.c1, qp.c0};
    roots = real_roots_bracketing(c);
  }
  for (double lam : roots) {
    if (lam < -1e-12 || std::abs(lam - 2.0) <= eq_tol) continue;
    lam = std::max(lam, 0.0);
    auto p = detail::boundary_point(X, yh, zh, X / (1.0 + lam));
    if (admit(p, X, u)) out.push_back(p);
  }
}

detail::BoundaryPoint symmetric_point(double X, double zh) {
  const double s = std::sqrt(zh * zh + 4.0 * X * X / 9.0);
  return {X / 3.0, 0.5 * (s - zh), 0.5 * (s + zh), 2.0};
}

double reduced_dist(const detail::BoundaryPoint& p, double X, double yh, double zh) {
  return sq(p.r - X) + sq(p.y - yh) + sq(p.z - zh);
}

// Nearest of the feasible points with a closed form. Only reached if rounding
// emptied the candidate pool; the returned point is feasible, not necessarily
// optimal.
detail::ReducedProjection face_fallback(double X, double yh, double zh, double u, double tilde, double c) {
  struct Pt {
    double scale, y, z;
  };
  std::vector<Pt> pts = {{0.0, 0.0, 0.0}, {0.0, std::max(yh, 0.0), 0.0}, {0.0, 0.0, std::clamp(zh, 0.0, u)}};
  if (X * X <= u * yh) pts.push_back({1.0, yh, u});
  if (tilde >= 0.0 && X > 0.0) pts.push_back({c, sq(c * X) / u, u});
  detail::ReducedProjection best;
  double bd = std::numeric_limits<double>::infinity();
  for (const Pt& p : pts) {
    const double d = sq((1.0 - p.scale) * X) + sq(p.y - yh) + sq(p.z - zh);
    if (d < bd) {
      bd = d;
      best.x_scale = p.scale;
      best.y = p.y;
      best.z = p.z;
    }
  }
  return best;
}

}  // namespace

bool RsocVector::is_finite() const noexcept { return std::isfinite(y) && std::isfinite(z) && x.allFinite(); }

double RsocVector::squared_distance(const RsocVector& other) const {
  if (other.x.size() != x.size()) fail(ErrorCode::InvalidArgument, "block dimensions differ");
  return (x - other.x).squaredNorm() + sq(y - other.y) + sq(z - other.z);
}

CappedRsoc::CappedRsoc(double cap, Eigen::Index block_dim) : cap_(cap), block_dim_(block_dim) {
  if (!(cap > 0.0) || !std::isfinite(cap)) fail(ErrorCode::InvalidArgument, "cap must be positive and finite");
  if (block_dim < 1) fail(ErrorCode::InvalidArgument, "block dimension must be at least 1");
}

std::string_view to_string(ProjectionCase c) noexcept {
  switch (c) {
    case ProjectionCase::Member: return "member";
    case ProjectionCase::Origin: return "origin";
    case ProjectionCase::YAxis: return "y_axis";
    case ProjectionCase::CapInterior: return "cap_interior";
    case ProjectionCase::CapParabola: return "cap_parabola";
    case ProjectionCase::ZSegment: return "z_segment";
    case ProjectionCase::ConeBoundaryQuartic: return "cone_boundary_quartic";
    case ProjectionCase::ConeBoundarySymmetric: return "cone_boundary_symmetric";
  }
  return "unknown";
}

bool membership(const RsocVector& v, const CappedRsoc& set, double feas_tol) {
  check_point(v, set);
  return v.x.squaredNorm() <= v.y * v.z + feas_tol && v.y >= -feas_tol && v.z >= -feas_tol &&
         v.z <= set.cap() + feas_tol;
}

double infeasibility(const RsocVector& v, const CappedRsoc& set) {
  check_point(v, set);
  return std::max({0.0, v.x.squaredNorm() - v.y * v.z, -v.y, -v.z, v.z - set.cap()});
}

double tilde_x_norm(double xhat_norm, double yhat, const CappedRsoc& set) {
  if (!(xhat_norm >= 0.0) || !std::isfinite(xhat_norm) || !std::isfinite(yhat))
    fail(ErrorCode::InvalidArgument, "tilde_x_norm needs a finite nonnegative norm");
  return cubic_root_norm(xhat_norm, yhat, set.cap());
}

double tilde_x_norm_radical(double xhat_norm, double yhat, double cap) {
  using C = std::complex<double>;
  const double su = std::sqrt(cap);
  const double rad = 81.0 * xhat_norm * xhat_norm * cap - 48.0 * yhat * yhat * yhat + 72.0 * yhat * yhat * cap -
                     36.0 * yhat * cap * cap + 6.0 * cap * cap * cap;
  const C inner = 54.0 * su * xhat_norm + 6.0 * std::sqrt(C(rad, 0.0));
  const C cr = std::pow(inner, 1.0 / 3.0);
  const C t = su / 6.0 * cr + su * (2.0 * yhat - cap) / cr;
  return t.real();
}

QuarticPoly norm_quartic(double X, double yh, double zh) {
  return {9.0,
          12.0 * X,
          -2.0 * X * X + 8.0 * yh * yh - 20.0 * yh * zh + 8.0 * zh * zh,
          -4.0 * X * X * X - 8.0 * yh * yh * X + 8.0 * X * yh * zh - 8.0 * X * zh * zh,
          X * X * X * X - 4.0 * X * X * yh * zh};
}

QuarticPoly multiplier_quartic(double X, double yh, double zh) {
  const double X2 = X * X;
  return {4.0 * yh * zh - X2,
          8.0 * (yh * yh + yh * zh + zh * zh),
          4.0 * (2.0 * X2 + 4.0 * yh * yh + 4.0 * zh * zh + 5.0 * yh * zh),
          8.0 * (yh * yh + 4.0 * yh * zh + zh * zh),
          16.0 * (yh * zh - X2)};
}

namespace detail {

// With lambda = X/r - 1 the stationarity conditions give y - z = 2(yh - zh)/(2 + lambda);
// together with yz = r^2 the larger of y, z is (s + |d|)/2 and the other one
// follows from the product, which avoids cancellation.
BoundaryPoint boundary_point(double X, double yh, double zh, double r) {
  BoundaryPoint p;
  p.r = r;
  if (!(r > 0.0)) return p;
  p.multiplier = X / r - 1.0;
  const double d = 2.0 * (yh - zh) / (2.0 + p.multiplier);
  const double s = std::hypot(d, 2.0 * r);
  if (d >= 0.0) {
    p.y = 0.5 * (s + d);
    p.z = r * r / p.y;
  } else {
    p.z = 0.5 * (s - d);
    p.y = r * r / p.z;
  }
  return p;
}

ReducedProjection project_reduced(double xsq, double yh, double zh, double u, const ProjectionTolerances& tol) {
  const Classified cl = classify_reduced(xsq, yh, zh, u, tol);
  ReducedProjection out;
  out.kind = cl.kind;
  out.tilde_norm = cl.kind == ProjectionCase::CapParabola ? cl.tilde : -1.0;
  switch (cl.kind) {
    case ProjectionCase::Member:
      out.x_scale = 1.0;
      out.y = yh;
      out.z = zh;
      return out;
    case ProjectionCase::Origin:
      return out;
    case ProjectionCase::YAxis:
      out.y = yh;
      return out;
    case ProjectionCase::CapInterior:
      out.x_scale = 1.0;
      out.y = yh;
      out.z = u;
      return out;
    case ProjectionCase::CapParabola:
      out.x_scale = cl.c;
      out.y = cl.c * cl.c * xsq / u;
      out.z = u;
      return out;
    case ProjectionCase::ZSegment:
      out.z = zh;
      return out;
    default:
      break;
  }

  const double X = std::sqrt(xsq);
  std::vector<BoundaryPoint> pool;
  if (cl.kind == ProjectionCase::ConeBoundarySymmetric) {
    auto p = symmetric_point(X, zh);
    if (admit(p, X, u)) pool.push_back(p);
  } else if (X > 0.0) {
    from_norm_quartic(X, yh, zh, u, pool);
    from_multiplier_quartic(X, yh, zh, u, tol.equality, pool);
  }
  if (pool.empty()) {
    ReducedProjection fb = face_fallback(X, yh, zh, u, cl.tilde, cl.c);
    fb.kind = cl.kind;
    return fb;
  }
  const auto best = std::min_element(pool.begin(), pool.end(), [&](const auto& a, const auto& b) {
    return reduced_dist(a, X, yh, zh) < reduced_dist(b, X, yh, zh);
  });
  out.x_scale = best->r / X;
  out.y = best->y;
  out.z = best->z;
  out.multiplier = std::max(best->multiplier, 0.0);
  return out;
}

}  // namespace detail

ProjectionCase classify(const RsocVector& v, const CappedRsoc& set, const ProjectionTolerances& tol) {
  check_point(v, set);
  return classify_reduced(v.x.squaredNorm(), v.y, v.z, set.cap(), tol).kind;
}

namespace {

std::vector<RsocVector> lift(const RsocVector& v, const std::vector<detail::BoundaryPoint>& pts) {
  const double X = v.x.norm();
  std::vector<RsocVector> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back({(p.r / X) * v.x, p.y, p.z});
  return out;
}

}  // namespace

std::vector<RsocVector> cone_boundary_candidates(const RsocVector& v, const CappedRsoc& set,
                                                 const ProjectionTolerances& tol) {
  check_point(v, set);
  const double X = v.x.norm();
  if (X == 0.0) fail(ErrorCode::InvalidArgument, "cone-boundary candidates need a nonzero x-block");
  std::vector<detail::BoundaryPoint> pts;
  if (std::abs(v.y + v.z) <= tol.equality) {
    auto p = symmetric_point(X, v.z);
    if (admit(p, X, set.cap())) pts.push_back(p);
    return lift(v, pts);
  }
  from_norm_quartic(X, v.y, v.z, set.cap(), pts);
  if (pts.empty() && classify(v, set, tol) == ProjectionCase::ConeBoundaryQuartic)
    fail(ErrorCode::InternalInconsistency, "no admissible root of the norm quartic");
  return lift(v, pts);
}

std::vector<RsocVector> lambda_quartic_candidates(const RsocVector& v, const CappedRsoc& set,
                                                  const ProjectionTolerances& tol) {
  check_point(v, set);
  const double X = v.x.norm();
  if (X == 0.0) fail(ErrorCode::InvalidArgument, "cone-boundary candidates need a nonzero x-block");
  std::vector<detail::BoundaryPoint> pts;
  from_multiplier_quartic(X, v.y, v.z, set.cap(), tol.equality, pts);
  return lift(v, pts);
}

ProjectionResult project(const RsocVector& v, const CappedRsoc& set, const ProjectionTolerances& tol) {
  check_point(v, set);
  const auto r = detail::project_reduced(v.x.squaredNorm(), v.y, v.z, set.cap(), tol);
  ProjectionResult out;
  out.point.x = r.x_scale == 1.0 ? v.x : Eigen::VectorXd(r.x_scale * v.x);
  out.point.y = r.y;
  out.point.z = r.z;
  out.kind = r.kind;
  out.multiplier = r.multiplier;
  if (r.tilde_norm >= 0.0) out.tilde_norm = r.tilde_norm;
  return out;
}

std::vector<ProjectionResult> project_cartesian(std::span<const RsocVector> batch, const CappedRsoc& set,
                                                unsigned threads, const ProjectionTolerances& tol) {
  std::vector<ProjectionResult> out(batch.size());
  const std::size_t n = batch.size();
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1u), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = project(batch[i], set, tol);
    return out;
  }
  // Each element is computed by the same pure function, so chunking cannot
  // change the results. Errors are rethrown on the calling thread.
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * n / workers; i < (w + 1) * n / workers; ++i) out[i] = project(batch[i], set, tol);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

ProjectionCase project_in_place(std::span<double> x, double& y, double& z, double cap,
                                const ProjectionTolerances& tol) {
  double xsq = 0.0;
  for (double xi : x) xsq += xi * xi;
  if (!std::isfinite(xsq) || !std::isfinite(y) || !std::isfinite(z))
    fail(ErrorCode::InvalidArgument, "point has non-finite entries");
  const auto r = detail::project_reduced(xsq, y, z, cap, tol);
  if (r.x_scale != 1.0)
    for (double& xi : x) xi *= r.x_scale;
  y = r.y;
  z = r.z;
  return r.kind;
}

}  // namespace caprsoc
