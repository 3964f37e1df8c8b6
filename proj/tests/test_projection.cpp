#include <doctest.h>

#include <cmath>
#include <random>

#include "caprsoc/error.hpp"
#include "caprsoc/projection_oracle.hpp"
#include "caprsoc/rsoc_projection.hpp"
#include "test_helpers.hpp"

using namespace caprsoc;
using testing_support::dist;
using testing_support::point;

namespace {

const CappedRsoc unit(1.0, 1);

// Bisection on the cap-parabola cubic, independent of the cubic solver.
double bisect_tilde(double X, double yh, double u) {
  auto f = [&](double w) { return w * w * w + (0.5 * u * u - u * yh) * w - 0.5 * u * u * X; };
  double lo = 0.0, hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (f(m) < 0.0 ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

void check_point(const RsocVector& got, const RsocVector& want, double tol) {
  REQUIRE(got.x.size() == want.x.size());
  CHECK(dist(got, want) <= tol);
}

}  // namespace

TEST_CASE("membership") {
  CHECK(membership(point({0}, 0, 0), unit));
  CHECK(membership(point({1}, 1, 1), unit));
  CHECK_FALSE(membership(point({1}, 0.5, 1), unit));
  CHECK(membership(point({1}, 1, 1 + 1e-13), unit));
  CHECK_FALSE(membership(point({1}, 1, 1 + 1e-11), unit));
  CHECK_THROWS_AS(membership(point({1, 2}, 1, 1), unit), Error);
  CHECK_THROWS_AS(membership(point({NAN}, 1, 1), unit), Error);
  CHECK_THROWS_AS(CappedRsoc(0.0, 1), Error);
  CHECK_THROWS_AS(CappedRsoc(1.0, 0), Error);
}

TEST_CASE("tilde norm") {
  CHECK(tilde_x_norm(2.0, 0.5, unit) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tilde_x_norm(0.0, 0.0, unit) == 0.0);
  CHECK(tilde_x_norm_radical(2.0, 0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(tilde_x_norm(-1.0, 0.0, unit), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> X(0.0, 2.0), Y(-2.0, 2.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = X(rng), y = Y(rng);
    const double t = tilde_x_norm(x, y, unit);
    const double res = t * t * t + (0.5 - y) * t - 0.5 * x;
    CHECK(std::abs(res) <= 1e-9 * std::max(1.0, x));
    CHECK(t == doctest::Approx(bisect_tilde(x, y, 1.0)).epsilon(1e-10));
    // The radical form is only reliable away from the three-root regime.
    if (81 * x * x - 6 * std::pow(2 * y - 1, 3) > 1.0 && x > 1e-3)
      CHECK(tilde_x_norm_radical(x, y, 1.0) == doctest::Approx(t).epsilon(1e-6));
  }
}

TEST_CASE("classification of the reference inputs") {
  CHECK(classify(point({0.5}, 0.5, 0.6), unit) == ProjectionCase::Member);
  CHECK(classify(point({0}, -1, -2), unit) == ProjectionCase::Origin);
  CHECK(classify(point({0}, 2, -1), unit) == ProjectionCase::YAxis);
  CHECK(classify(point({0.5}, 1, 3), unit) == ProjectionCase::CapInterior);
  CHECK(classify(point({0}, -0.5, 0.5), unit) == ProjectionCase::ZSegment);
  CHECK(classify(point({2}, 0.5, 3), unit) == ProjectionCase::CapParabola);
  CHECK(classify(point({1}, -0.5, 0.5), unit) == ProjectionCase::ConeBoundarySymmetric);
  CHECK(classify(point({1}, 0.1, 0.1), unit) == ProjectionCase::ConeBoundaryQuartic);
}

TEST_CASE("projection of the reference inputs") {
  auto r = project(point({0.5}, 0.5, 0.6), unit);
  check_point(r.point, point({0.5}, 0.5, 0.6), 0.0);
  CHECK(r.kind == ProjectionCase::Member);

  r = project(point({0.5}, 1, 3), unit);
  check_point(r.point, point({0.5}, 1, 1), 1e-15);
  CHECK(r.kind == ProjectionCase::CapInterior);

  r = project(point({2}, 0.5, 3), unit);
  check_point(r.point, point({1}, 1, 1), 1e-14);
  CHECK(r.kind == ProjectionCase::CapParabola);
  REQUIRE(r.tilde_norm);
  CHECK(*r.tilde_norm == doctest::Approx(1.0));

  r = project(point({1}, -0.5, 0.5), unit);
  check_point(r.point, point({1.0 / 3}, 1.0 / 6, 2.0 / 3), 1e-15);
  CHECK(r.kind == ProjectionCase::ConeBoundarySymmetric);
  CHECK(r.multiplier == doctest::Approx(2.0));

  r = project(point({0}, -1, -2), unit);
  check_point(r.point, point({0}, 0, 0), 0.0);
  r = project(point({0}, 2, -1), unit);
  check_point(r.point, point({0}, 2, 0), 0.0);
  r = project(point({0}, -0.5, 0.5), unit);
  check_point(r.point, point({0}, 0, 0.5), 0.0);

  // Five-dimensional block with y-hat = -z-hat: the symmetric face point
  // x = x-hat / 3 would need z > u, so the cap takes over.
  const CappedRsoc five(1.0, 5);
  const RsocVector v = point({1, 1, 1, 1, 1}, -0.5, 0.5);
  const double s = std::sqrt(0.25 + 4.0 * 5.0 / 9.0);
  CHECK(0.5 * (s + 0.5) > 1.0);
  r = project(v, five);
  CHECK(r.kind == ProjectionCase::CapParabola);
  CHECK(r.point.z == 1.0);
  check_point(r.point, oracle_project(v, five), 1e-5);
}

TEST_CASE("cone-boundary candidates") {
  const auto sym = cone_boundary_candidates(point({1}, -0.5, 0.5), unit);
  REQUIRE(sym.size() == 1);
  check_point(sym[0], point({1.0 / 3}, 1.0 / 6, 2.0 / 3), 1e-15);
  CHECK(std::abs(sym[0].x.squaredNorm() - sym[0].y * sym[0].z) < 1e-15);

  // lambda = 2 is the singular root of the multiplier formulation.
  for (const auto& c : lambda_quartic_candidates(point({1}, -0.5, 0.5), unit))
    CHECK(std::abs(1.0 / c.x[0] - 3.0) > 1e-6);

  const RsocVector v = point({1}, 0.1, 0.1);
  const auto a = cone_boundary_candidates(v, unit);
  const auto b = lambda_quartic_candidates(v, unit);
  REQUIRE_FALSE(a.empty());
  REQUIRE_FALSE(b.empty());
  auto nearest = [&](const std::vector<RsocVector>& c, const RsocVector& to) {
    return *std::min_element(c.begin(), c.end(),
                             [&](const auto& p, const auto& q) { return dist(p, to) < dist(q, to); });
  };
  check_point(nearest(a, v), nearest(b, v), 1e-7);
  check_point(nearest(a, v), oracle_project(v, unit), 1e-5);

  const RsocVector tiny = point({1e-6}, 0.1, 0.1);
  const auto ta = cone_boundary_candidates(tiny, unit);
  const auto tb = lambda_quartic_candidates(tiny, unit);
  // Interior point: every root needs r > ||x-hat|| or lambda < 0, so both
  // formulations agree on having nothing to offer.
  CHECK(ta.size() == tb.size());
  if (!ta.empty() && !tb.empty()) check_point(nearest(ta, tiny), nearest(tb, tiny), 1e-7);

  // A point on the cone face is its own lambda = 0 candidate.
  const RsocVector face = point({0.3}, 0.45, 0.2);
  bool found = false;
  for (const auto& c : lambda_quartic_candidates(face, unit)) found |= dist(c, face) < 1e-12;
  CHECK(found);

  CHECK_THROWS_AS(cone_boundary_candidates(point({0}, 0.1, 0.1), unit), Error);
}

TEST_CASE("quartic branch output lies on the cone face") {
  std::mt19937_64 rng(8);
  int hits = 0;
  for (int i = 0; i < 5000; ++i) {
    const RsocVector v = testing_support::random_point(rng, 1);
    const auto r = project(v, unit);
    if (r.kind != ProjectionCase::ConeBoundaryQuartic) continue;
    ++hits;
    const auto& p = r.point;
    CHECK(std::abs(p.x.squaredNorm() - p.y * p.z) <= 1e-8);
    CHECK(p.y > 0.0);
    CHECK(p.z > 0.0);
    CHECK(p.z <= 1.0);
    const double lam = v.x.norm() / p.x.norm() - 1.0;
    CHECK(lam >= 0.0);
    CHECK(r.multiplier == doctest::Approx(lam).epsilon(1e-9));
  }
  CHECK(hits > 500);
}

TEST_CASE("case boundaries give matching points") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.05, 2.0);
  for (int i = 0; i < 200; ++i) {
    // ||x-hat||^2 = u y-hat with z-hat > u: cap interior meets the parabola.
    const double X = U(rng);
    const RsocVector v = point({X}, X * X, 1.0 + U(rng));
    const double t = tilde_x_norm(X, v.y, unit);
    CHECK(t == doctest::Approx(X).epsilon(1e-9));
    check_point(project(v, unit).point, point({X}, X * X, 1.0), 1e-7);

    // ||x-hat||^2 = 4 y-hat z-hat on the negative quadrant: origin meets the
    // cone face, where the face candidate collapses to the origin.
    const double a = U(rng), b = U(rng);
    const RsocVector w = point({2.0 * std::sqrt(a * b) * (1 - 1e-9)}, -a, -b);
    CHECK(testing_support::full_norm(project(w, unit).point) <= 1e-7);
    const RsocVector w2 = point({2.0 * std::sqrt(a * b) * (1 + 1e-9)}, -a, -b);
    CHECK(testing_support::full_norm(project(w2, unit).point) <= 1e-4);
  }
}

TEST_CASE("project_cartesian matches project and ignores threading") {
  CHECK(project_cartesian({}, unit).empty());
  std::mt19937_64 rng(4);
  std::vector<RsocVector> batch;
  for (int i = 0; i < 1000; ++i) batch.push_back(testing_support::random_point(rng, 1));
  const auto seq = project_cartesian(batch, unit);
  const auto par = project_cartesian(batch, unit, 4);
  REQUIRE(seq.size() == batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto single = project(batch[i], unit);
    CHECK(seq[i].point.x == single.point.x);
    CHECK(seq[i].point.y == single.point.y);
    CHECK(par[i].point.x == seq[i].point.x);
    CHECK(par[i].point.y == seq[i].point.y);
    CHECK(par[i].point.z == seq[i].point.z);
    CHECK(par[i].kind == seq[i].kind);
    CHECK(membership(seq[i].point, unit, 1e-12));
  }
}

TEST_CASE("in-place kernel agrees with project") {
  std::mt19937_64 rng(12);
  const CappedRsoc set(1.5, 3);
  for (int i = 0; i < 500; ++i) {
    RsocVector v = testing_support::random_point(rng, 3);
    const auto r = project(v, set);
    const auto kind = project_in_place(std::span<double>(v.x.data(), 3), v.y, v.z, 1.5);
    CHECK(kind == r.kind);
    CHECK(v.x == r.point.x);
    CHECK(v.y == r.point.y);
    CHECK(v.z == r.point.z);
  }
}

TEST_CASE("operator properties on a small sample") {
  std::mt19937_64 rng(21);
  for (Eigen::Index m : {1, 3}) {
    const CappedRsoc set(1.0, m);
    for (int i = 0; i < 300; ++i) {
      const RsocVector a = testing_support::random_point(rng, m);
      const RsocVector b = testing_support::random_point(rng, m);
      const auto pa = project(a, set).point;
      const auto pb = project(b, set).point;
      CHECK(dist(project(pa, set).point, pa) <= 1e-9 * (1 + testing_support::full_norm(a)));
      CHECK(dist(pa, pb) <= dist(a, b) + 1e-9);

      const Eigen::MatrixXd Q = testing_support::random_orthogonal(rng, m);
      const auto pr = project({Q * a.x, a.y, a.z}, set).point;
      CHECK(dist(pr, {Q * pa.x, pa.y, pa.z}) <= 1e-10);

      const double alpha = std::exp(std::uniform_real_distribution<double>(-2, 2)(rng));
      const auto ps = project({alpha * a.x, alpha * a.y, alpha * a.z}, CappedRsoc(alpha, m)).point;
      CHECK(dist(ps, {alpha * pa.x, alpha * pa.y, alpha * pa.z}) <= 1e-10 * std::max(1.0, alpha));
    }
  }
}

TEST_CASE("non-finite input is rejected") {
  CHECK_THROWS_AS(project(point({INFINITY}, 0, 0), unit), Error);
  CHECK_THROWS_AS(classify(point({0}, NAN, 0), unit), Error);
  double y = NAN, z = 0.0;
  double x = 1.0;
  CHECK_THROWS_AS(project_in_place(std::span<double>(&x, 1), y, z, 1.0), Error);
}
