#include "caprsoc/poly_roots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "caprsoc/error.hpp"

namespace caprsoc {
namespace {

struct EvalResult {
  double value;
  double slope;
};

// Horner with derivative, coefficients highest degree first.
EvalResult horner(std::span<const double> c, double x) noexcept {
  double v = 0.0;
  double dv = 0.0;
  for (double ci : c) {
    dv = dv * x + v;
    v = v * x + ci;
  }
  return {v, dv};
}

double monomial_scale(std::span<const double> c, double x) noexcept {
  const std::size_t deg = c.size() - 1;
  double s = 0.0;
  double xp = 1.0;
  for (std::size_t i = 0; i <= deg; ++i) {
    s = std::max(s, std::abs(c[deg - i] * xp));
    xp *= x;
  }
  return s;
}

double newton_polish(std::span<const double> c, double x0, int max_iters) noexcept {
  double best = x0;
  double best_res = std::abs(horner(c, x0).value);
  double x = x0;
  for (int it = 0; it < max_iters && best_res > 0.0; ++it) {
    const auto [v, dv] = horner(c, x);
    if (dv == 0.0 || !std::isfinite(dv)) break;
    const double step = v / dv;
    x -= step;
    if (!std::isfinite(x)) break;
    const double res = std::abs(horner(c, x).value);
    if (res < best_res) {
      best = x;
      best_res = res;
    }
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return best;
}

double bisect(std::span<const double> c, double a, double b, double fa) noexcept {
  for (int it = 0; it < 400; ++it) {
    const double m = a + 0.5 * (b - a);
    if (m <= a || m >= b) break;
    const double fm = horner(c, m).value;
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  // Pick whichever end has the smaller residual.
  return std::abs(horner(c, a).value) <= std::abs(horner(c, b).value) ? a : b;
}

std::array<double, 5> coeffs(const QuarticPoly& qp) { return {qp.c4, qp.c3, qp.c2, qp.c1, qp.c0}; }

}  // namespace

void merge_close_roots(std::vector<double>& roots, double merge_tol) {
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  out.reserve(roots.size());
  for (double r : roots) {
    if (!out.empty() && std::abs(r - out.back()) <= merge_tol * std::max(1.0, std::abs(r))) continue;
    out.push_back(r);
  }
  roots = std::move(out);
}

// ---------------------------------------------------------------------------
// Cubic

CubicIntermediates cubic_intermediates(const DepressedCubic& c) {
  CubicIntermediates ci;
  ci.d = -c.p / 3.0;
  ci.f = c.q / 2.0;
  const double d3 = ci.d * ci.d * ci.d;
  if (ci.d > 0.0 && ci.f * ci.f <= d3) {
    ci.three_real = true;
    const double ratio = std::clamp(ci.f / (ci.d * std::sqrt(ci.d)), -1.0, 1.0);
    ci.theta = std::acos(ratio);
  } else {
    const double disc = ci.f * ci.f - d3;
    const double first = -std::copysign(std::cbrt(std::abs(ci.f) + std::sqrt(std::max(disc, 0.0))), ci.f);
    ci.h = first != 0.0 ? ci.d / first : 0.0;
  }
  return ci;
}

std::vector<double> solve_depressed_cubic(const DepressedCubic& c, double tol) {
  if (!std::isfinite(c.p) || !std::isfinite(c.q)) fail(ErrorCode::InvalidArgument, "cubic coefficients must be finite");

  const CubicIntermediates ci = cubic_intermediates(c);
  std::vector<double> roots;
  if (ci.three_real) {
    const double sd = std::sqrt(ci.d);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    roots = {-2.0 * sd * std::cos(ci.theta / 3.0), -2.0 * sd * std::cos((ci.theta + two_pi) / 3.0),
             -2.0 * sd * std::cos((ci.theta - two_pi) / 3.0)};
  } else {
    // Cardano: the first term is the larger-magnitude cube root, h = d / first.
    const double disc = ci.f * ci.f - ci.d * ci.d * ci.d;
    const double first = -std::copysign(std::cbrt(std::abs(ci.f) + std::sqrt(std::max(disc, 0.0))), ci.f);
    roots = {first + ci.h};
  }

  const std::array<double, 4> poly{1.0, 0.0, c.p, c.q};
  for (double& r : roots) r = newton_polish(poly, r, 20);
  merge_close_roots(roots, 1e-8);

  const double scale = std::max({1.0, std::abs(c.p), std::abs(c.q)});
  std::vector<double> accepted;
  for (double r : roots) {
    if (std::abs(horner(poly, r).value) <= tol * std::max(scale, monomial_scale(poly, r))) accepted.push_back(r);
  }
  if (accepted.empty()) {
    // The real root of a cubic always exists; keep the best one found.
    accepted.push_back(*std::min_element(roots.begin(), roots.end(), [&](double a, double b) {
      return std::abs(horner(poly, a).value) < std::abs(horner(poly, b).value);
    }));
  }
  return accepted;
}

// ---------------------------------------------------------------------------
// Quartic

double QuarticPoly::operator()(double x) const noexcept { return horner(coeffs(*this), x).value; }

double QuarticPoly::derivative(double x) const noexcept { return horner(coeffs(*this), x).slope; }

double QuarticPoly::scale_at(double x) const noexcept { return monomial_scale(coeffs(*this), x); }

double polish_root(const QuarticPoly& qp, double x0, int max_iters) {
  return newton_polish(coeffs(qp), x0, max_iters);
}

QuarticIntermediates quartic_intermediates(const QuarticPoly& qp, const RootSolverConfig& cfg) {
  using cd = std::complex<double>;
  const double a = qp.c4, b = qp.c3, c = qp.c2, d = qp.c1, e = qp.c0;

  QuarticIntermediates qi;
  qi.shift = -b / (4.0 * a);
  qi.p_dep = (8.0 * a * c - 3.0 * b * b) / (8.0 * a * a);
  qi.q_dep = (b * b * b - 4.0 * a * b * c + 8.0 * a * a * d) / (8.0 * a * a * a);
  qi.r_dep = (-3.0 * b * b * b * b + 256.0 * a * a * a * e - 64.0 * a * a * b * d + 16.0 * a * b * b * c) /
             (256.0 * a * a * a * a);
  qi.delta0 = c * c - 3.0 * b * d + 12.0 * a * e;
  qi.delta1 = 2.0 * c * c * c - 9.0 * b * c * d + 27.0 * b * b * e + 27.0 * a * d * d - 72.0 * a * c * e;
  qi.discriminant = cd(qi.delta1 * qi.delta1 - 4.0 * qi.delta0 * qi.delta0 * qi.delta0, 0.0);

  const cd root_disc = std::sqrt(qi.discriminant);
  const cd plus = 0.5 * (qi.delta1 + root_disc);
  const cd minus = 0.5 * (qi.delta1 - root_disc);
  const cd cube = std::abs(plus) >= std::abs(minus) ? plus : minus;
  qi.p = std::pow(cube, 1.0 / 3.0);

  const double p_scale = std::max({1.0, std::sqrt(std::abs(qi.delta0)), std::cbrt(std::abs(qi.delta1))});
  if (!std::isfinite(std::abs(qi.p)) || std::abs(qi.p) < cfg.degenerate_tol * p_scale) {
    qi.degenerate = true;
    return qi;
  }

  // Any of the three cube roots is valid; take the one giving the largest k.
  const cd omega = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  cd best_p = qi.p;
  cd best_k(0.0, 0.0);
  cd pj = qi.p;
  for (int j = 0; j < 3; ++j, pj *= omega) {
    const cd inner = -2.0 * qi.p_dep / 3.0 + (pj + qi.delta0 / pj) / (3.0 * a);
    const cd k = std::sqrt(inner);  // k = 2S
    if (std::abs(k) > std::abs(best_k)) {
      best_k = k;
      best_p = pj;
    }
  }
  qi.p = best_p;
  qi.k = best_k;

  const double root_scale = std::max({1.0, std::abs(qi.shift), std::sqrt(std::abs(qi.p_dep)),
                                      std::cbrt(std::abs(qi.q_dep)), std::sqrt(std::sqrt(std::abs(qi.r_dep)))});
  if (!std::isfinite(std::abs(qi.k)) || std::abs(qi.k) < cfg.degenerate_tol * root_scale) {
    qi.degenerate = true;
    return qi;
  }
  qi.r = -qi.k * qi.k - 2.0 * qi.p_dep;
  qi.s = -2.0 * qi.q_dep / qi.k;
  if (!std::isfinite(std::abs(qi.r)) || !std::isfinite(std::abs(qi.s))) qi.degenerate = true;
  return qi;
}

std::vector<double> solve_quartic(const QuarticPoly& qp, double tol, const RootSolverConfig& cfg) {
  if (qp.c4 == 0.0) fail(ErrorCode::InvalidArgument, "quartic leading coefficient must be nonzero");
  for (double c : coeffs(qp)) {
    if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "quartic coefficients must be finite");
  }

  const QuarticIntermediates qi = quartic_intermediates(qp, cfg);
  if (qi.degenerate) return numeric_quartic_fallback(qp, cfg);

  const std::complex<double> half_k = 0.5 * qi.k;
  const std::complex<double> lo = 0.5 * std::sqrt(qi.r - qi.s);
  const std::complex<double> hi = 0.5 * std::sqrt(qi.r + qi.s);
  const std::array<std::complex<double>, 4> candidates{qi.shift - half_k - lo, qi.shift - half_k + lo,
                                                       qi.shift + half_k - hi, qi.shift + half_k + hi};

  const auto c = coeffs(qp);
  std::vector<double> seeds;
  std::vector<double> roots;
  for (const auto& cand : candidates) {
    if (!std::isfinite(cand.real()) || !std::isfinite(cand.imag())) return numeric_quartic_fallback(qp, cfg);
    if (std::abs(cand.imag()) >= cfg.complex_accept_tol) continue;
    const double x = newton_polish(c, cand.real(), cfg.polish_iters);
    if (std::abs(horner(c, x).value) <= tol * monomial_scale(c, x)) {
      seeds.push_back(cand.real());
      roots.push_back(x);
    }
  }

  // Two distinct candidates that polished onto the same root mean the closed
  // form lost a root to cancellation.
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      const double same = cfg.merge_tol * std::max(1.0, std::abs(roots[i]));
      const double apart = 1e-6 * std::max(1.0, std::abs(seeds[i]));
      if (std::abs(roots[i] - roots[j]) <= same && std::abs(seeds[i] - seeds[j]) > apart) {
        return numeric_quartic_fallback(qp, cfg);
      }
    }
  }

  merge_close_roots(roots, cfg.merge_tol);
  return roots;
}

std::vector<double> real_roots_bracketing(std::span<const double> coeffs_in, double merge_tol) {
  std::size_t lead = 0;
  while (lead < coeffs_in.size() && coeffs_in[lead] == 0.0) ++lead;
  const std::span<const double> c = coeffs_in.subspan(lead);
  if (c.size() <= 1) return {};
  if (c.size() == 2) return {-c[1] / c[0]};

  const std::size_t deg = c.size() - 1;
  std::vector<double> dc(deg);
  for (std::size_t i = 0; i < deg; ++i) dc[i] = c[i] * static_cast<double>(deg - i);
  const std::vector<double> crit = real_roots_bracketing(dc, 0.0);

  double bound = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) bound = std::max(bound, std::abs(c[i] / c[0]));
  bound += 1.0;

  std::vector<double> knots;
  knots.push_back(-bound);
  for (double x : crit) {
    if (x > -bound && x < bound) knots.push_back(x);
  }
  knots.push_back(bound);

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    const double fa = horner(c, a).value;
    const double fb = horner(c, b).value;
    if (fa == 0.0) {
      roots.push_back(a);
      continue;
    }
    if (fb == 0.0) continue;  // picked up as the next interval's left end
    if ((fa < 0.0) != (fb < 0.0)) roots.push_back(bisect(c, a, b, fa));
  }
  // Tangential (even-multiplicity) roots sit on critical points without a
  // sign change.
  for (double x : crit) {
    if (std::abs(horner(c, x).value) <= 1e-10 * monomial_scale(c, x)) roots.push_back(x);
  }
  merge_close_roots(roots, merge_tol);
  return roots;
}

std::vector<double> numeric_quartic_fallback(const QuarticPoly& qp, const RootSolverConfig& cfg) {
  if (qp.c4 == 0.0) fail(ErrorCode::InvalidArgument, "quartic leading coefficient must be nonzero");
  const auto c = coeffs(qp);
  std::vector<double> roots = real_roots_bracketing(c, cfg.merge_tol);
  std::erase_if(roots, [&](double x) { return std::abs(horner(c, x).value) > 1e-10 * monomial_scale(c, x); });
  return roots;
}

}  // namespace caprsoc
