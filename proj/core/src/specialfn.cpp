#include "sinebeta/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "sinebeta/error.hpp"

namespace sinebeta::specialfn {
namespace {

std::string describe(const char* fn, double x) {
  std::ostringstream os;
  os.precision(17);
  os << fn << ": argument " << x << " outside domain";
  return os.str();
}

void require_finite(const char* fn, double x) {
  if (!std::isfinite(x)) throw_domain(describe(fn, x));
}

// Arithmetic-geometric mean sequence for the complementary modulus
// kc = sqrt(1 - m). Returns the AGM and, when requested, the weighted sum
// sum_{n>=0} 2^{n-1} c_n^2 with c_0^2 = m, which gives E through
// E = K (1 - sum).
struct AgmResult {
  double mean;
  double weighted_sum;
};

AgmResult agm(double m, double kc) {
  double a = 1.0;
  double g = kc;
  // c_{n+1} = c_n^2 / (4 a_{n+1}) avoids forming a - g, which is pure
  // rounding noise once the means agree (and that noise, weighted by 2^n,
  // would swamp the sum).
  double c2 = m;
  double sum = 0.5 * m;
  double pow2 = 0.5;
  for (int i = 0; i < 64; ++i) {
    const double an = 0.5 * (a + g);
    g = std::sqrt(a * g);
    a = an;
    c2 = c2 * c2 / (16.0 * a * a);
    pow2 *= 2.0;
    sum += pow2 * c2;
    if (pow2 * c2 <= 1e-17 * std::abs(sum) || c2 == 0.0) break;
  }
  // The mean itself converges quadratically; finish it.
  for (int i = 0; i < 8 && a != g; ++i) {
    const double an = 0.5 * (a + g);
    g = std::sqrt(a * g);
    a = an;
  }
  return {a, sum};
}

double complementary_modulus(double m) { return std::sqrt(1.0 - m); }

}  // namespace

double elliptic_k(double m) {
  require_finite("elliptic_k", m);
  if (m >= 1.0) throw_domain(describe("elliptic_k", m));
  if (m == 0.0) return 0.5 * kPi;
  const AgmResult r = agm(m, complementary_modulus(m));
  return 0.5 * kPi / r.mean;
}

double elliptic_e(double m) {
  require_finite("elliptic_e", m);
  if (m >= 1.0) throw_domain(describe("elliptic_e", m));
  if (m == 0.0) return 0.5 * kPi;
  const AgmResult r = agm(m, complementary_modulus(m));
  return 0.5 * kPi / r.mean * (1.0 - r.weighted_sum);
}

double lambert_w_lower(double z) {
  require_finite("lambert_w_lower", z);
  if (z < -kInvE) {
    if (z >= -kInvE - kBoundarySlack) return -1.0;
    throw_domain(describe("lambert_w_lower", z));
  }
  if (z >= 0.0) throw_domain(describe("lambert_w_lower", z));
  if (z <= -kInvE + kBoundarySlack) return -1.0;

  double w;
  if (z < -0.25) {
    // Series about the branch point in p = -sqrt(2(1 + e z)).
    const double p = -std::sqrt(2.0 * (1.0 + std::exp(1.0) * z));
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
    // Halley on f(w) = w e^w - z; the log form is ill-conditioned near -1.
    for (int i = 0; i < 50; ++i) {
      const double ew = std::exp(w);
      const double f = w * ew - z;
      const double wp1 = w + 1.0;
      if (wp1 == 0.0) break;
      const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
      const double step = f / denom;
      w -= step;
      if (w > -1.0) w = -1.0;
      if (std::abs(step) <= 4e-16 * std::abs(w)) break;
    }
    return w;
  }

  // Asymptotic start near 0^-, then Halley on g(w) = w + log(-w) - log(-z),
  // which stays representable for subnormal z.
  const double l1 = std::log(-z);
  const double l2 = std::log(-l1);
  w = l1 - l2 + l2 / l1;
  if (w > -1.0) w = -1.0 - 1e-3;
  for (int i = 0; i < 50; ++i) {
    const double g = w + std::log(-w) - l1;
    const double g1 = 1.0 + 1.0 / w;
    const double g2 = -1.0 / (w * w);
    const double step = g / (g1 - 0.5 * g * g2 / g1);
    w -= step;
    if (w > -1.0) w = -1.0;
    if (std::abs(step) <= 4e-16 * std::abs(w)) break;
  }
  return w;
}

double k_inverse_asymptotic(double x) {
  require_finite("k_inverse_asymptotic", x);
  if (!(x > 0.0) || x > 4.0 * kInvE) {
    throw_domain(describe("k_inverse_asymptotic", x));
  }
  const double w = lambert_w_lower(-0.25 * x);
  return -(w * w) / (x * x);
}

double k_inverse(double x) {
  require_finite("k_inverse", x);
  const double half_pi = 0.5 * kPi;
  if (x > half_pi) {
    if (x <= half_pi + kBoundarySlack) return 0.0;
    throw_domain(describe("k_inverse", x));
  }
  if (!(x > 0.0)) throw_domain(describe("k_inverse", x));
  if (x >= half_pi - kBoundarySlack) return 0.0;

  // Solve log K(-a) = log x for s = log1p(a); the map is smooth and strictly
  // decreasing in s over [0, inf).
  const double target = std::log(x);
  auto f = [&](double s) { return std::log(elliptic_k(-std::expm1(s))) - target; };

  double guess = 1.0;
  if (x < 0.5) guess = std::log1p(-k_inverse_asymptotic(x));
  double lo = 0.0;
  double flo = f(lo);  // > 0 since x < pi/2
  double hi = std::max(guess, 1.0);
  double fhi = f(hi);
  while (fhi > 0.0) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = f(hi);
    if (hi > 1e4) throw_numerical("k_inverse: failed to bracket root");
  }
  if (guess > lo && guess < hi) {
    const double fg = f(guess);
    if (fg > 0.0) {
      lo = guess;
      flo = fg;
    } else {
      hi = guess;
      fhi = fg;
    }
  }

  // A few bisection steps, then Illinois-modified secant inside the bracket.
  for (int i = 0; i < 6; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm > 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  int side = 0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    double s = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
    const double fs = f(s);
    if (fs == 0.0) {
      lo = hi = s;
      break;
    }
    if (fs > 0.0) {
      lo = s;
      flo = fs;
      if (side == 1) fhi *= 0.5;
      side = 1;
    } else {
      hi = s;
      fhi = fs;
      if (side == -1) flo *= 0.5;
      side = -1;
    }
  }
  const double s = std::abs(flo) < std::abs(fhi) ? lo : hi;
  return -std::expm1(s);
}

double normal_cdf(double x) {
  require_finite("normal_cdf", x);
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double brownian_sup_lower_bound(double delta) {
  require_finite("brownian_sup_lower_bound", delta);
  if (!(delta > 0.0)) throw_domain(describe("brownian_sup_lower_bound", delta));
  // 2 Phi(y) - 1 = erf(y / sqrt 2), which avoids cancellation for small delta.
  const double v = 2.0 * std::erf(delta / (4.0 * std::sqrt(2.0)));
  return v > 0.0 ? v : 0.0;
}

}  // namespace sinebeta::specialfn
