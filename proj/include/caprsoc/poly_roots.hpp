#pragma once

// Real roots of low-degree polynomials.
//
// The depressed cubic solver follows the trigonometric / Cardano split: three
// real roots are produced with the cosine formula when the discriminant is
// nonnegative, otherwise the single real root comes from the Cardano sum. The
// quartic solver runs the closed-form Ferrari resolution in complex
// arithmetic, accepts nearly-real candidates, and polishes them with Newton
// steps. Whenever an intermediate quantity degenerates the call is routed to
// numeric_quartic_fallback(), which brackets roots between critical points and
// bisects; it shares no code with the closed form.

#include <complex>
#include <span>
#include <vector>

namespace caprsoc {

/// w^3 + p*w + q = 0
struct DepressedCubic {
  double p = 0.0;
  double q = 0.0;
};

/// Helper quantities of the cubic: d = -p/3, f = q/2, and on the
/// three-root branch (f^2 <= d^3) the angle theta = acos(f / d^{3/2}).
/// h is the second Cardano term on the one-root branch (zero otherwise).
struct CubicIntermediates {
  double d = 0.0;
  double f = 0.0;
  double theta = 0.0;
  double h = 0.0;
  bool three_real = false;
};

CubicIntermediates cubic_intermediates(const DepressedCubic& c);

/// Returns the distinct real roots in ascending order (1, 2 or 3 of them).
/// Every root is Newton-polished. Throws InvalidArgument on non-finite input.
std::vector<double> solve_depressed_cubic(const DepressedCubic& c, double tol = 1e-12);

/// c4*x^4 + c3*x^3 + c2*x^2 + c1*x + c0
struct QuarticPoly {
  double c4 = 0.0;
  double c3 = 0.0;
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;

  double operator()(double x) const noexcept;
  double derivative(double x) const noexcept;
  /// max_i |c_i x^i|, the size of the largest monomial at x.
  double scale_at(double x) const noexcept;
};

/// Intermediates of the closed-form quartic resolution.
///
/// The quartic is shifted by `shift` = -c3/(4 c4) to the depressed form
/// t^4 + p_dep t^2 + q_dep t + r_dep. delta0/delta1 are the resolvent
/// invariants, `p` the complex cube root built from them, and the four
/// candidate roots are
///   shift - k/2 -+ sqrt(r - s)/2,   shift + k/2 -+ sqrt(r + s)/2.
struct QuarticIntermediates {
  double shift = 0.0;
  double p_dep = 0.0;
  double q_dep = 0.0;
  double r_dep = 0.0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  std::complex<double> discriminant;  // delta1^2 - 4 delta0^3
  std::complex<double> p;
  std::complex<double> k;
  std::complex<double> r;
  std::complex<double> s;
  bool degenerate = false;
};

struct RootSolverConfig {
  /// Candidates whose imaginary part is below this are treated as real.
  double complex_accept_tol = 1e-4;
  /// Roots closer than merge_tol * max(1, |x|) are reported once.
  double merge_tol = 1e-8;
  /// |p| or |k| below degenerate_tol * scale routes to the numeric fallback.
  double degenerate_tol = 1e-12;
  int polish_iters = 20;
};

QuarticIntermediates quartic_intermediates(const QuarticPoly& qp, const RootSolverConfig& cfg = {});

/// Distinct real roots in ascending order; each satisfies
/// |qp(x)| <= tol * qp.scale_at(x). Requires c4 != 0.
std::vector<double> solve_quartic(const QuarticPoly& qp, double tol = 1e-10,
                                  const RootSolverConfig& cfg = {});

/// Newton iteration from x0; returns the iterate with the smallest residual
/// seen, so |qp(result)| <= |qp(x0)|.
double polish_root(const QuarticPoly& qp, double x0, int max_iters = 20);

/// Bracketing + bisection between critical points. Requires c4 != 0.
std::vector<double> numeric_quartic_fallback(const QuarticPoly& qp, const RootSolverConfig& cfg = {});

/// Real roots of an arbitrary-degree polynomial, coefficients highest degree
/// first. Leading exact zeros are dropped. Used by the fallback and by callers
/// whose leading coefficient may vanish.
std::vector<double> real_roots_bracketing(std::span<const double> coeffs, double merge_tol = 1e-8);

/// Sorts and merges roots closer than merge_tol * max(1, |x|).
void merge_close_roots(std::vector<double>& roots, double merge_tol);

}  // namespace caprsoc
