#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "caprsoc/error.hpp"
#include "caprsoc/poly_roots.hpp"

using namespace caprsoc;

namespace {

// Real eigenvalues of the companion matrix; shares nothing with the solvers.
std::vector<double> companion_roots(const QuarticPoly& qp, double imag_tol = 1e-7) {
  Eigen::Matrix4d C = Eigen::Matrix4d::Zero();
  C(0, 0) = -qp.c3 / qp.c4;
  C(0, 1) = -qp.c2 / qp.c4;
  C(0, 2) = -qp.c1 / qp.c4;
  C(0, 3) = -qp.c0 / qp.c4;
  C(1, 0) = C(2, 1) = C(3, 2) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix4d> es(C, false);
  std::vector<double> out;
  for (int i = 0; i < 4; ++i)
    if (std::abs(es.eigenvalues()[i].imag()) <= imag_tol) out.push_back(es.eigenvalues()[i].real());
  std::sort(out.begin(), out.end());
  return out;
}

double cubic_residual(const DepressedCubic& c, double w) { return w * w * w + c.p * w + c.q; }

void check_close_sets(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(tol));
}

}  // namespace

TEST_CASE("depressed cubic basics") {
  check_close_sets(solve_depressed_cubic({0.0, -1.0}), {1.0}, 1e-14);
  check_close_sets(solve_depressed_cubic({-1.0, 0.0}), {-1.0, 0.0, 1.0}, 1e-14);
  // w^3 - 3w + 2 = (w - 1)^2 (w + 2)
  check_close_sets(solve_depressed_cubic({-3.0, 2.0}), {-2.0, 1.0}, 1e-7);
  CHECK_THROWS_AS(solve_depressed_cubic({NAN, 1.0}), Error);
}

TEST_CASE("cubic branch agrees with the root count") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    const DepressedCubic c{U(rng), U(rng)};
    const auto roots = solve_depressed_cubic(c);
    const double scale = std::max({1.0, std::abs(c.p), std::abs(c.q)});
    for (double w : roots) CHECK(std::abs(cubic_residual(c, w)) <= 1e-12 * scale * std::max(1.0, w * w * w));
    const double disc = -(4 * c.p * c.p * c.p + 27 * c.q * c.q);
    if (disc > 1e-6) CHECK(roots.size() == 3);
    if (disc < -1e-6) CHECK(roots.size() == 1);
    CHECK(cubic_intermediates(c).three_real == (disc >= 0.0));
  }
}

TEST_CASE("quartic examples") {
  check_close_sets(solve_quartic({1, 0, -5, 0, 4}), {-2, -1, 1, 2}, 1e-14);
  check_close_sets(solve_quartic({1, -2, 2, -2, 1}), {1.0}, 1e-7);
  const QuarticPoly q{9, 12, -2.04, -4.08, 0.96};
  check_close_sets(solve_quartic(q), numeric_quartic_fallback(q), 1e-9);
  CHECK(numeric_quartic_fallback({1, 0, 0, 0, 1}).empty());
}

TEST_CASE("polish_root never increases the residual") {
  const QuarticPoly q{1, 0, -5, 0, 4};
  CHECK(polish_root(q, 1.001) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(polish_root(q, 1.0) == 1.0);
  const QuarticPoly r{9, 12, -2.04, -4.08, 0.96};
  for (double x0 : {-1.3, -0.6, 0.2, 0.4, 0.9}) CHECK(std::abs(r(polish_root(r, x0))) <= std::abs(r(x0)));
}

TEST_CASE("planted roots are recovered by both solvers") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    std::array<double, 4> r{U(rng), U(rng), U(rng), U(rng)};
    std::sort(r.begin(), r.end());
    bool separated = true;
    for (int k = 0; k < 3; ++k) separated &= r[k + 1] - r[k] > 1e-3;
    if (!separated) continue;
    const double e1 = r[0] + r[1] + r[2] + r[3];
    const double e2 = r[0] * r[1] + r[0] * r[2] + r[0] * r[3] + r[1] * r[2] + r[1] * r[3] + r[2] * r[3];
    const double e3 = r[0] * r[1] * r[2] + r[0] * r[1] * r[3] + r[0] * r[2] * r[3] + r[1] * r[2] * r[3];
    const double e4 = r[0] * r[1] * r[2] * r[3];
    const QuarticPoly q{1, -e1, e2, -e3, e4};
    for (const auto& roots : {numeric_quartic_fallback(q), solve_quartic(q)}) {
      REQUIRE(roots.size() == 4);
      for (int k = 0; k < 4; ++k) CHECK(std::abs(roots[k] - r[k]) <= 1e-8);
    }
  }
}

TEST_CASE("closed form, fallback and companion matrix agree on random quartics") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  int compared = 0;
  for (int i = 0; i < 3000; ++i) {
    QuarticPoly q{U(rng), U(rng), U(rng), U(rng), U(rng)};
    if (std::abs(q.c4) < 0.1) continue;
    const auto a = solve_quartic(q);
    const auto b = numeric_quartic_fallback(q);
    for (double x : a) CHECK(std::abs(q(x)) <= 1e-10 * q.scale_at(x));
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-7);
    // The companion matrix loses accuracy at double roots; compare only
    // well-separated cases.
    const auto c = companion_roots(q);
    bool separated = c.size() == a.size();
    for (std::size_t k = 1; k < c.size(); ++k) separated &= c[k] - c[k - 1] > 1e-3;
    if (separated) {
      ++compared;
      for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - c[k]) <= 1e-8 * std::max(1.0, std::abs(c[k])));
    }
  }
  CHECK(compared > 1000);
}

TEST_CASE("four real roots reconstruct the monic polynomial") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  int seen = 0;
  for (int i = 0; i < 5000 && seen < 200; ++i) {
    QuarticPoly q{U(rng), U(rng), U(rng), U(rng), U(rng)};
    if (std::abs(q.c4) < 0.1) continue;
    const auto r = solve_quartic(q);
    if (r.size() != 4) continue;
    ++seen;
    const double e1 = r[0] + r[1] + r[2] + r[3];
    const double e2 = r[0] * r[1] + r[0] * r[2] + r[0] * r[3] + r[1] * r[2] + r[1] * r[3] + r[2] * r[3];
    const double e3 = r[0] * r[1] * r[2] + r[0] * r[1] * r[3] + r[0] * r[2] * r[3] + r[1] * r[2] * r[3];
    const double e4 = r[0] * r[1] * r[2] * r[3];
    CHECK(std::abs(-e1 - q.c3 / q.c4) <= 1e-6 * std::max(1.0, std::abs(e1)));
    CHECK(std::abs(e2 - q.c2 / q.c4) <= 1e-6 * std::max(1.0, std::abs(e2)));
    CHECK(std::abs(-e3 - q.c1 / q.c4) <= 1e-6 * std::max(1.0, std::abs(e3)));
    CHECK(std::abs(e4 - q.c0 / q.c4) <= 1e-6 * std::max(1.0, std::abs(e4)));
  }
  CHECK(seen > 20);
}

TEST_CASE("degenerate quartics go through the fallback") {
  // (x - 1)^4: every Ferrari intermediate vanishes.
  check_close_sets(solve_quartic({1, -4, 6, -4, 1}), {1.0}, 1e-4);
  // x^4: all roots at zero.
  const auto z = solve_quartic({1, 0, 0, 0, 0});
  REQUIRE(z.size() == 1);
  CHECK(std::abs(z[0]) < 1e-3);
  // Biquadratic with q_dep = 0.
  check_close_sets(solve_quartic({2, 0, -10, 0, 8}), {-2, -1, 1, 2}, 1e-12);
  CHECK(quartic_intermediates({1, -4, 6, -4, 1}).degenerate);
}

TEST_CASE("bracketing handles lower degree and leading zeros") {
  const std::array<double, 4> lin{0.0, 0.0, 2.0, -1.0};
  check_close_sets(real_roots_bracketing(lin), {0.5}, 1e-14);
  const std::array<double, 3> quad{1.0, 0.0, -4.0};
  check_close_sets(real_roots_bracketing(quad), {-2.0, 2.0}, 1e-14);
}
