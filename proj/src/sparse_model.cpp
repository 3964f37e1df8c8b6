#include "caprsoc/sparse_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "caprsoc/error.hpp"

namespace caprsoc {
namespace {

void check_point(const SparseRegressionProblem& p, const DecisionPoint& w) {
  if (w.x.size() != p.n() || w.y.size() != p.q() || w.z.size() != p.q())
    fail(ErrorCode::DimensionMismatch, "decision point has shape (" + std::to_string(w.x.size()) + ", " +
                                           std::to_string(w.y.size()) + ", " + std::to_string(w.z.size()) +
                                           "), problem expects (" + std::to_string(p.n()) + ", " +
                                           std::to_string(p.q()) + ", " + std::to_string(p.q()) + ")");
}

}  // namespace

DecisionPoint DecisionPoint::zeros(const SparseRegressionProblem& p) {
  return {Eigen::VectorXd::Zero(p.n()), Eigen::VectorXd::Zero(p.q()), Eigen::VectorXd::Zero(p.q())};
}

void validate_partition(const Partition& groups, Eigen::Index n) {
  std::vector<char> seen(static_cast<std::size_t>(std::max<Eigen::Index>(n, 0)), 0);
  Eigen::Index covered = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) fail(ErrorCode::InvalidArgument, "group " + std::to_string(g) + " is empty");
    for (Eigen::Index j : groups[g]) {
      if (j < 0 || j >= n) fail(ErrorCode::InvalidArgument, "group index " + std::to_string(j) + " out of range");
      if (seen[j]) fail(ErrorCode::InvalidArgument, "column " + std::to_string(j) + " appears in two groups");
      seen[j] = 1;
      ++covered;
    }
  }
  if (covered != n) fail(ErrorCode::InvalidArgument, "groups do not cover every column");
}

Partition consecutive_groups(Eigen::Index n, Eigen::Index q) {
  if (q < 1 || q > n) fail(ErrorCode::InvalidArgument, "group count must lie in [1, n]");
  const Eigen::Index size = n / q;
  Partition out(static_cast<std::size_t>(q));
  for (Eigen::Index j = 0; j < n; ++j) out[static_cast<std::size_t>(std::min(j / size, q - 1))].push_back(j);
  return out;
}

void validate(const SparseRegressionProblem& p) {
  if (p.A.rows() != p.b.size()) fail(ErrorCode::DimensionMismatch, "A and b have different row counts");
  if (p.n() < 1 || p.t() < 1) fail(ErrorCode::InvalidArgument, "problem needs at least one row and column");
  if (!(p.gamma1 >= 0.0) || !(p.gamma2 >= 0.0)) fail(ErrorCode::InvalidArgument, "penalties must be nonnegative");
  if (!(p.cap > 0.0) || !std::isfinite(p.cap)) fail(ErrorCode::InvalidArgument, "cap must be positive");
  if (!p.A.allFinite() || !p.b.allFinite()) fail(ErrorCode::InvalidArgument, "A and b must be finite");
  if (p.groups) validate_partition(*p.groups, p.n());
}

double objective(const SparseRegressionProblem& p, const DecisionPoint& w) {
  check_point(p, w);
  const Eigen::VectorXd r = p.A * w.x;
  return r.squaredNorm() - 2.0 * p.b.dot(r) + p.gamma1 * w.z.sum() + p.gamma2 * w.y.sum();
}

DecisionPoint gradient(const SparseRegressionProblem& p, const DecisionPoint& w) {
  check_point(p, w);
  DecisionPoint g;
  g.x = 2.0 * (p.A.transpose() * (p.A * w.x - p.b));
  g.y = Eigen::VectorXd::Constant(p.q(), p.gamma2);
  g.z = Eigen::VectorXd::Constant(p.q(), p.gamma1);
  return g;
}

double lipschitz_estimate(const SparseRegressionProblem& p, int iters, std::uint64_t seed) {
  if (iters < 1) fail(ErrorCode::InvalidArgument, "power iteration needs at least one step");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(p.n());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
  v.normalize();
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd w = p.A.transpose() * (p.A * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    lambda = v.dot(w);
    v = w / nw;
  }
  // Rayleigh quotient of the last unit iterate.
  lambda = std::max(lambda, (p.A * v).squaredNorm());
  return 2.0 * lambda * 1.01;
}

double reverse_huber(double x) noexcept {
  const double a = std::abs(x);
  return a <= 1.0 ? a : 0.5 * (x * x + 1.0);
}

InnerMinimum inner_minimize(double x, double gamma1, double gamma2) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) fail(ErrorCode::InvalidArgument, "inner minimisation needs positive penalties");
  if (x == 0.0) return {};
  InnerMinimum m;
  m.z = std::min(1.0, std::sqrt(gamma2 / gamma1) * std::abs(x));
  m.y = x * x / m.z;
  m.value = gamma1 * m.z + gamma2 * m.y;
  return m;
}

double reduced_objective(const SparseRegressionProblem& p, const Eigen::VectorXd& x) {
  if (p.groups) fail(ErrorCode::Unsupported, "reduced objective is defined for ungrouped problems only");
  if (p.cap != 1.0) fail(ErrorCode::Unsupported, "reduced objective assumes cap 1");
  if (!(p.gamma1 > 0.0) || !(p.gamma2 > 0.0)) fail(ErrorCode::InvalidArgument, "reduced objective needs positive penalties");
  if (x.size() != p.n()) fail(ErrorCode::DimensionMismatch, "x has the wrong length");
  const Eigen::VectorXd r = p.A * x;
  const double k = std::sqrt(p.gamma2 / p.gamma1);
  double pen = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) pen += reverse_huber(k * x[i]);
  return r.squaredNorm() - 2.0 * p.b.dot(r) + 2.0 * p.gamma1 * pen;
}

std::vector<RsocVector> group_blocks(const SparseRegressionProblem& p, const DecisionPoint& w) {
  check_point(p, w);
  std::vector<RsocVector> out;
  out.reserve(static_cast<std::size_t>(p.q()));
  if (!p.groups) {
    for (Eigen::Index i = 0; i < p.n(); ++i) out.push_back({Eigen::VectorXd::Constant(1, w.x[i]), w.y[i], w.z[i]});
    return out;
  }
  validate_partition(*p.groups, p.n());
  for (std::size_t g = 0; g < p.groups->size(); ++g) {
    const auto& idx = (*p.groups)[g];
    Eigen::VectorXd xg(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) xg[static_cast<Eigen::Index>(k)] = w.x[idx[k]];
    out.push_back({std::move(xg), w.y[static_cast<Eigen::Index>(g)], w.z[static_cast<Eigen::Index>(g)]});
  }
  return out;
}

void project_point(const SparseRegressionProblem& p, DecisionPoint& w, const ProjectionTolerances& tol) {
  check_point(p, w);
  if (!p.groups) {
    for (Eigen::Index i = 0; i < p.n(); ++i) project_in_place(std::span<double>(&w.x[i], 1), w.y[i], w.z[i], p.cap, tol);
    return;
  }
  std::vector<double> buf;
  for (std::size_t g = 0; g < p.groups->size(); ++g) {
    const auto& idx = (*p.groups)[g];
    buf.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) buf[k] = w.x[idx[k]];
    const auto gi = static_cast<Eigen::Index>(g);
    project_in_place(buf, w.y[gi], w.z[gi], p.cap, tol);
    for (std::size_t k = 0; k < idx.size(); ++k) w.x[idx[k]] = buf[k];
  }
}

bool point_is_feasible(const SparseRegressionProblem& p, const DecisionPoint& w, double feas_tol) {
  for (const RsocVector& blk : group_blocks(p, w))
    if (!membership(blk, CappedRsoc(p.cap, blk.block_dim()), feas_tol)) return false;
  return true;
}

SparseRegressionProblem synth_instance(const SynthOptions& opt) {
  if (opt.t < 1 || opt.n < 1) fail(ErrorCode::InvalidArgument, "synthetic instance needs t, n >= 1");
  if (opt.sparsity < 0 || opt.sparsity > opt.n) fail(ErrorCode::InvalidArgument, "sparsity must lie in [0, n]");
  if (!(opt.noise >= 0.0)) fail(ErrorCode::InvalidArgument, "noise must be nonnegative");
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  SparseRegressionProblem p;
  p.A.resize(opt.t, opt.n);
  for (Eigen::Index j = 0; j < opt.n; ++j)
    for (Eigen::Index i = 0; i < opt.t; ++i) p.A(i, j) = gauss(rng);
  std::vector<Eigen::Index> cols(static_cast<std::size_t>(opt.n));
  std::iota(cols.begin(), cols.end(), Eigen::Index{0});
  std::shuffle(cols.begin(), cols.end(), rng);
  Eigen::VectorXd planted = Eigen::VectorXd::Zero(opt.n);
  std::bernoulli_distribution coin(0.5);
  for (Eigen::Index k = 0; k < opt.sparsity; ++k) planted[cols[static_cast<std::size_t>(k)]] = coin(rng) ? 1.0 : -1.0;
  p.b = p.A * planted;
  for (Eigen::Index i = 0; i < opt.t; ++i) p.b[i] += opt.noise * gauss(rng);
  return p;
}

}  // namespace caprsoc
