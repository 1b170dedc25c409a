#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sinebeta/specialfn.hpp"

namespace sinebeta::cli {
namespace sf = sinebeta::specialfn;

double oracle_elliptic_k(double m) {
  const double a = -m;
  // 1/sqrt(cosh^2 z + a) = 2 e^-z / sqrt((1 + e^-2z)^2 + 4 a e^-2z), no overflow.
  auto f = [a](double z) {
    const double e = std::exp(-z);
    const double q = 1.0 + e * e;
    return 2.0 * e / std::sqrt(q * q + 4.0 * a * e * e);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, 1e-15);
}

double oracle_elliptic_e(double m) {
  auto f = [m](double x) {
    const double s = std::sin(x);
    return std::sqrt(1.0 - m * s * s);
  };
  // The integrand has a boundary layer of width ~ 1/sqrt(-m) at 0; split there.
  const double knee = std::min(0.5, 1.0 / std::sqrt(std::max(1.0, -m)));
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  return GK::integrate(f, 0.0, knee, 12, 1e-14) + GK::integrate(f, knee, sf::kPi / 2, 12, 1e-14);
}

namespace {

void push(std::vector<Check>& out, std::string name, double p, double v, double ref,
          double residual, double tol) {
  out.push_back({std::move(name), p, v, ref, residual, tol, residual <= tol});
}

void report(std::vector<Check>& out, std::string name, double p, double v) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.push_back({std::move(name), p, v, nan, nan, nan, std::isfinite(v)});
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) {
    g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  }
  return g;
}

}  // namespace

std::vector<Check> verify_specialfn() {
  std::vector<Check> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // K and E against quadrature on 50 points of [-1e6, 0).
  for (double a : log_grid(1e-3, 1e6, 50)) {
    const double k = sf::elliptic_k(-a);
    const double kq = oracle_elliptic_k(-a);
    push(out, "elliptic_k_quadrature", -a, k, kq, std::abs(k - kq) / kq, 1e-10);
  }
  for (double a : log_grid(1e-3, 1e6, 50)) {
    const double e = sf::elliptic_e(-a);
    const double eq = oracle_elliptic_e(-a);
    push(out, "elliptic_e_quadrature", -a, e, eq, std::abs(e - eq) / eq, 1e-10);
  }
  for (double a : {0.5, 1.0, 3.0, 10.0, 100.0}) {
    const double k = sf::elliptic_k(-a);
    const double kq = oracle_elliptic_k(-a);
    push(out, "elliptic_k_cosh_form", -a, k, kq, std::abs(k - kq), 1e-10);
  }
  push(out, "elliptic_k_zero", 0.0, sf::elliptic_k(0.0), sf::kPi / 2,
       std::abs(sf::elliptic_k(0.0) - sf::kPi / 2), 1e-15);
  push(out, "elliptic_e_zero", 0.0, sf::elliptic_e(0.0), sf::kPi / 2,
       std::abs(sf::elliptic_e(0.0) - sf::kPi / 2), 1e-15);

  // Large-a behaviour; the scaled gaps should settle to a constant.
  for (double a : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    const double k = sf::elliptic_k(-a);
    const double lead = std::log(16.0 * a) / (2.0 * std::sqrt(a));
    report(out, "k_asymptotic_ratio", a, std::pow(a, 1.5) * std::abs(k - lead) / std::log(a));
  }
  for (double a : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    const double e = sf::elliptic_e(-a);
    report(out, "e_asymptotic_ratio", a, std::sqrt(a) * std::abs(e - std::sqrt(a)) / std::log(a));
  }

  // k_inverse: round trip and the x < 1/2 approximation.
  for (double a : log_grid(1e-3, 1e6, 30)) {
    const double m = sf::k_inverse(sf::elliptic_k(-a));
    push(out, "k_inverse_roundtrip", -a, m, -a, std::abs(m + a) / std::max(1.0, a), 1e-8);
  }
  push(out, "k_inverse_endpoint", sf::kPi / 2, sf::k_inverse(sf::kPi / 2), 0.0,
       std::abs(sf::k_inverse(sf::kPi / 2)), 1e-12);
  for (double x : {0.05, 0.1, 0.2, 0.3, 0.4, 0.49}) {
    report(out, "k_inverse_vs_w_gap", x, sf::k_inverse(x) - sf::k_inverse_asymptotic(x));
  }

  // Lambert W, lower branch.
  const double e_inv = std::exp(-1.0);
  for (double s : log_grid(1e-300, 1.0, 100)) {
    const double z = -e_inv * s;
    const double w = sf::lambert_w_lower(z);
    push(out, "lambert_w_residual", z, w, z, std::abs(w * std::exp(w) - z) / std::abs(z), 1e-13);
  }
  std::vector<double> xs = log_grid(1e-12, e_inv, 40);
  for (int j = 1; j <= 4; ++j) xs.push_back(e_inv * (1.0 - std::pow(10.0, -j)));
  for (double x : xs) {
    const double w = sf::lambert_w_lower(x * std::log(x));
    push(out, "lambert_w_xlogx", x, w, std::log(x), std::abs(w - std::log(x)), 1e-10);
  }
  push(out, "lambert_w_branch_point", -e_inv, sf::lambert_w_lower(-e_inv), -1.0,
       std::abs(sf::lambert_w_lower(-e_inv) + 1.0), 1e-12);

  // Lipschitz-type bounds on (0, 1/(2e)]: fitted constants are reported.
  {
    const std::vector<double> g = log_grid(1e-12, 0.5 * e_inv, 60);
    double c_lip = 0.0;
    double c_log = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double wi = sf::lambert_w_lower(-g[i]);
      c_log = std::max(c_log, std::abs(wi) / std::log(1.0 / g[i]));
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        const double wj = sf::lambert_w_lower(-g[j]);
        c_lip = std::max(c_lip, std::abs(wi - wj) / std::abs(std::log(g[i] / g[j])));
      }
    }
    report(out, "w_lipschitz_constant", nan, c_lip);
    report(out, "w_log_growth_constant", nan, c_log);
  }

  // Normal CDF and the Brownian sup bound.
  push(out, "normal_cdf_zero", 0.0, sf::normal_cdf(0.0), 0.5, std::abs(sf::normal_cdf(0.0) - 0.5),
       1e-15);
  {
    const double x = 1.959963984540054;
    push(out, "normal_cdf_975", x, sf::normal_cdf(x), 0.975, std::abs(sf::normal_cdf(x) - 0.975),
         1e-12);
  }
  for (double x : {0.3, 1.0, 2.5, 6.0}) {
    const double r = std::abs(sf::normal_cdf(-x) - (1.0 - sf::normal_cdf(x)));
    push(out, "normal_cdf_symmetry", x, sf::normal_cdf(-x), 1.0 - sf::normal_cdf(x), r, 1e-15);
  }
  {
    double prev = 0.0;
    bool monotone = true;
    for (double d : log_grid(1e-6, 100.0, 40)) {
      const double v = sf::brownian_sup_lower_bound(d);
      monotone = monotone && v >= prev;
      prev = v;
    }
    out.push_back({"brownian_sup_monotone", nan, prev, nan, monotone ? 0.0 : 1.0, 0.0, monotone});
  }
  return out;
}

}  // namespace sinebeta::cli
