#include "caprsoc/projection_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "caprsoc/error.hpp"

namespace caprsoc {
namespace {

constexpr int kWindow = 8;  // refinement window half-width, in coarse cells

struct Best {
  double y = 0.0;
  double z = 0.0;
  double f = std::numeric_limits<double>::infinity();
};

// The search runs over (s, t) with y = s^2, z = t^2: the product sqrt(yz) = st
// is smooth there, while in (y, z) it has unbounded slope along both axes and
// a coarse grid can miss a minimiser tucked against y = 0 or z = 0. The map is
// a homeomorphism of the quadrant, so the only local minimum is still global.
struct Reduced {
  double X, yh, zh;
  double operator()(double s, double t) const noexcept { return oracle_reduced_objective(X, yh, zh, s * s, t * t); }
};

// Evaluates the lattice lo + k*h (plus the upper end) on both axes.
void scan(const Reduced& f, double ylo, double yhi, double hy, double zlo, double zhi, double hz, Best& best) {
  const auto ny = static_cast<long>(std::ceil((yhi - ylo) / hy - 1e-9));
  const auto nz = static_cast<long>(std::ceil((zhi - zlo) / hz - 1e-9));
  for (long i = 0; i <= ny; ++i) {
    const double y = i == ny ? yhi : ylo + static_cast<double>(i) * hy;
    for (long j = 0; j <= nz; ++j) {
      const double z = j == nz ? zhi : zlo + static_cast<double>(j) * hz;
      const double v = f(y, z);
      if (v < best.f) best = {y, z, v};
    }
  }
}

bool on_window_edge(double c, double lo, double hi, double box_lo, double box_hi) {
  return (c == lo && lo > box_lo) || (c == hi && hi < box_hi);
}

// Smallest upward nudge of y that makes ||x||^2 <= yz hold exactly.
void make_member(RsocVector& w) {
  for (int i = 0; i < 64 && w.x.squaredNorm() > w.y * w.z; ++i)
    w.y = std::nextafter(w.y, std::numeric_limits<double>::infinity());
  while (w.x.squaredNorm() > w.y * w.z) w.y *= 1.0 + 1e-15;
}

Eigen::VectorXd unit_direction(const Eigen::VectorXd& x) {
  const double n = x.norm();
  if (n > 0.0) return x / n;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(x.size());
  e[0] = 1.0;
  return e;
}

}  // namespace

double oracle_reduced_objective(double X, double yhat, double zhat, double y, double z) noexcept {
  const double gap = std::max(X - std::sqrt(y * z), 0.0);
  return gap * gap + (y - yhat) * (y - yhat) + (z - zhat) * (z - zhat);
}

RsocVector oracle_project(const RsocVector& v, const CappedRsoc& set, const OracleConfig& cfg) {
  if (cfg.grid_init < 16) fail(ErrorCode::InvalidArgument, "oracle grid_init must be at least 16");
  if (!(cfg.target_cell > 0.0)) fail(ErrorCode::InvalidArgument, "oracle target_cell must be positive");
  if (cfg.refine_rounds < 0 || !(cfg.y_max_factor >= 1.0))
    fail(ErrorCode::InvalidArgument, "oracle refine_rounds must be >= 0 and y_max_factor >= 1");
  if (v.x.size() != set.block_dim()) fail(ErrorCode::InvalidArgument, "x-block length does not match the set");
  if (!v.is_finite()) fail(ErrorCode::InvalidArgument, "point has non-finite entries");

  const double u = set.cap();
  const double X = v.x.norm();
  const Reduced f{X, v.y, v.z};
  const double ymax = cfg.y_max_factor * std::max({1.0, std::abs(v.y), X * X / u});

  const double smax = std::sqrt(ymax);
  const double tmax = std::sqrt(u);
  double hy = smax / (cfg.grid_init - 1);
  double hz = tmax / (cfg.grid_init - 1);
  Best best;
  scan(f, 0.0, smax, hy, 0.0, tmax, hz, best);

  // A cell of h in s moves y by at most 2 smax h.
  const double h0 = std::max(hy, hz);
  const double h_final = cfg.target_cell / (2.0 * std::max(smax, tmax));
  const double ratio =
      cfg.refine_rounds > 0 ? std::max(2.0, std::pow(h0 / h_final, 1.0 / cfg.refine_rounds)) : 1.0;
  for (int round = 0; round < cfg.refine_rounds; ++round) {
    const double hy_next = hy / ratio;
    const double hz_next = hz / ratio;
    // Recentre at the same resolution while the optimum sits on the window edge.
    for (int recentre = 0; recentre < 32; ++recentre) {
      const double ylo = std::max(0.0, best.y - kWindow * hy);
      const double yhi = std::min(smax, best.y + kWindow * hy);
      const double zlo = std::max(0.0, best.z - kWindow * hz);
      const double zhi = std::min(tmax, best.z + kWindow * hz);
      scan(f, ylo, yhi, hy_next, zlo, zhi, hz_next, best);
      if (!on_window_edge(best.y, ylo, yhi, 0.0, smax) && !on_window_edge(best.z, zlo, zhi, 0.0, tmax)) break;
    }
    hy = hy_next;
    hz = hz_next;
  }

  RsocVector out;
  out.y = best.y * best.y;
  out.z = std::min(best.z * best.z, u);
  const double r = std::min(X, std::sqrt(out.y * out.z));
  out.x = X > 0.0 ? Eigen::VectorXd((r / X) * v.x) : Eigen::VectorXd::Zero(v.x.size());
  make_member(out);
  return out;
}

std::vector<RsocVector> sample_feasible(const CappedRsoc& set, std::size_t count, std::uint64_t seed) {
  const Eigen::Index m = set.block_dim();
  const double u = set.cap();
  const double ymax = 4.0 * std::max(1.0, u);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto direction = [&] {
    Eigen::VectorXd d(m);
    for (Eigen::Index i = 0; i < m; ++i) d[i] = gauss(rng);
    return unit_direction(d);
  };

  std::vector<RsocVector> out;
  out.reserve(count);
  auto push = [&](RsocVector w) {
    if (out.size() < count) {
      make_member(w);
      out.push_back(std::move(w));
    }
  };
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(m);
  push({zero, 0.0, 0.0});
  push({zero, ymax * unif(rng), 0.0});
  push({zero, 0.0, u});
  {
    const double a = 2.0 * std::sqrt(u * ymax) * unif(rng);
    push({a * direction(), a * a / u, u});
  }
  while (out.size() < count) {
    const std::size_t kind = out.size() % 4;
    const double z = kind == 2 ? u : u * unif(rng);
    const double t = unif(rng);
    const double y = ymax * t * t;
    const double beta = kind == 1 ? 1.0 : unif(rng);
    push({std::sqrt(y * z) * beta * direction(), y, z});
  }
  return out;
}

double projection_certificate(const RsocVector& v, const RsocVector& p, const CappedRsoc& set,
                              std::size_t samples, std::uint64_t seed) {
  if (v.x.size() != set.block_dim() || p.x.size() != set.block_dim())
    fail(ErrorCode::InvalidArgument, "x-block length does not match the set");
  if (!membership(p, set, 1e-9)) fail(ErrorCode::InvalidArgument, "certificate needs a feasible candidate");

  const Eigen::VectorXd rx = v.x - p.x;
  const double ry = v.y - p.y;
  const double rz = v.z - p.z;
  double cert = 0.0;  // w = p
  auto probe = [&](const Eigen::VectorXd& wx, double wy, double wz) {
    cert = std::max(cert, rx.dot(wx - p.x) + ry * (wy - p.y) + rz * (wz - p.z));
  };

  for (const RsocVector& w : sample_feasible(set, samples, seed)) probe(w.x, w.y, w.z);

  const double u = set.cap();
  const double X = v.x.norm();
  const Eigen::VectorXd d = unit_direction(v.x);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(v.x.size());

  probe(p.x, p.y + 1.0, p.z);  // y is unbounded above
  probe(zero, 0.0, 0.0);
  probe(zero, 0.0, u);
  probe(zero, 0.0, 0.5 * u);
  probe(zero, 1.0, 0.0);
  if (X * X > 0.0) probe(v.x, X * X / u, u);
  if (v.y != 0.0) {
    const double a = -u / (2.0 * v.y);
    probe(a * v.x, a * a * X * X / u, u);
  }

  // Boundary surface ||x||^2 = yz along +-x-hat, including the cap parabola.
  const double amax = 2.0 * std::max({1.0, X, std::sqrt(u * std::max(0.0, v.y))});
  constexpr int na = 32;
  constexpr int nz = 16;
  for (int i = -na; i <= na; ++i) {
    const double a = amax * i / na;
    for (int j = 1; j <= nz; ++j) {
      const double z = u * j / nz;
      probe(a * d, a * a / z, z);
    }
  }
  for (int i = 0; i <= 16; ++i) probe(zero, amax * amax * i / 16.0, 0.0);
  return cert;
}

}  // namespace caprsoc
