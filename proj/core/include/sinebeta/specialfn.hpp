#pragma once

// Special functions used by the hitting-time and overcrowding bounds.
//
// All functions are pure and reentrant. Arguments outside the declared
// domain raise sinebeta::Error with ErrorKind::Domain; no function returns a
// non-finite value. Arguments within kBoundarySlack of a closed domain
// boundary are clamped onto it.

namespace sinebeta::specialfn {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInvE = 0.36787944117144232160;  // 1/e
inline constexpr double kBoundarySlack = 1e-15;

/// Complete elliptic integral of the first kind in parameter form,
/// K(m) = int_0^{pi/2} dx / sqrt(1 - m sin^2 x), for m < 1.
double elliptic_k(double m);

/// Complete elliptic integral of the second kind,
/// E(m) = int_0^{pi/2} sqrt(1 - m sin^2 x) dx, for m < 1.
double elliptic_e(double m);

/// Inverse of elliptic_k restricted to m <= 0, where K decreases from pi/2
/// to 0. Accepts x in (0, pi/2].
double k_inverse(double x);

/// Leading-order approximation of k_inverse for small x:
/// -x^{-2} W(-x/4)^2 with W the lower Lambert branch. Defined for
/// 0 < x <= 4/e.
double k_inverse_asymptotic(double x);

/// Lower branch W_{-1} of the Lambert W function: the solution w <= -1 of
/// w e^w = z for z in [-1/e, 0).
double lambert_w_lower(double z);

/// Standard normal cumulative distribution function.
double normal_cdf(double x);

/// Lower bound 2(2 Phi(delta/4) - 1) on P(sup_{t<=1} |B_t| <= delta) for a
/// standard Brownian motion, clipped below at 0. Requires delta > 0.
double brownian_sup_lower_bound(double delta);

}  // namespace sinebeta::specialfn
