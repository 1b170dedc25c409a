#pragma once

#include <span>
#include <vector>

// Closed-form overcrowding and hitting-time bounds, and the two recursions
// that drive the overcrowding exponent. Everything is evaluated on log scale.
namespace sinebeta::bounds {

/// Constants for the two-sided overcrowding envelope and the recursions.
struct BoundEnvelope {
  double beta = 2.0;
  double lambda0 = 1.0;
  double c = 1.0;   // envelope constant
  double c1 = 1.0;  // lower-recursion / rescaled trivial bound constant
  double c2 = 1.0;  // upper-recursion constant

  void validate() const;
};

struct LogInterval {
  double lower;
  double upper;
};

/// -(beta/2) n^2 log(n / lambda).
double leading_log_order(int n, double lambda, double beta);

/// n log(n+1) log(n/lambda) + n^2, the coefficient of c in the envelope.
/// Negative only when lambda > n exp(n / log(n+1)).
double envelope_width_factor(int n, double lambda);

/// log of the envelope
///   exp(-(beta/2) n^2 log(n/lambda) -/+ c n log(n+1) log(n/lambda) -/+ c n^2)
/// for 0 < lambda <= lambda0 and n >= 1.
LogInterval envelope_log_bounds(int n, double lambda, const BoundEnvelope& env);

/// log (lambda / 2 pi)^n.
double trivial_log_upper(int n, double lambda);

/// -n log(n/lambda) + c1 n^2, the trivial bound rewritten with c1 > 1.
double rescaled_trivial_log_upper(int n, double lambda, double c1);

enum class Side { Upper, Lower };

/// -(2/t) W(-lambda t)^2, the leading hitting-time exponent.
double tau_log_leading(double lambda, double t);

/// -(2/t) W(-lambda t)^2 +/- c (1 + 1/t) log(1/(lambda t)); requires
/// lambda t < 1/e (values within 1e-15 of 1/e are clamped).
double tau_log_bound(double lambda, double t, double c, Side side);

/// f_n = ((n+1)/n) f_{n-1} + (beta/2) n + c1 for n > n0, f_{n0} = f0.
/// The sequence is built once up to n_max and is immutable afterwards.
class LowerRecursion {
 public:
  LowerRecursion(double beta, double c1, int n0, double f0, int n_max);

  int n0() const noexcept { return n0_; }
  int n_max() const noexcept { return n0_ + static_cast<int>(values_.size()) - 1; }

  /// Iterated value; n0 <= n <= n_max.
  double value(int n) const;

  /// General solution matched to f_{n0} = f0:
  ///   (beta/2) n (n+1) + (c1 - beta/2)(n+1) H_{n+1} + C (n+1).
  double closed_form(int n) const;

  /// The constant C of the general solution.
  double constant() const noexcept { return constant_; }

 private:
  double beta_;
  double c1_;
  int n0_;
  std::vector<double> values_;
  double constant_;
};

enum class UpperBranch { SqrtStep, Geometric, Cap };

/// f_n = min(f_{n-1} + sqrt(2 beta f_{n-1}) - c2, f_{n-1}(1 + 3/n),
///           (beta/2) n^2) for n > n0, with f_{n0} = n0.
class UpperRecursion {
 public:
  UpperRecursion(double beta, double c2, int n0, int n_max);

  int n0() const noexcept { return n0_; }
  int n_max() const noexcept { return n0_ + static_cast<int>(values_.size()) - 1; }
  double value(int n) const;
  /// Which argument of the min produced f_n (n > n0).
  UpperBranch branch(int n) const;

  struct RegimeChange {
    int n;
    UpperBranch branch;
  };
  /// First index of every run of consecutive equal branches.
  std::vector<RegimeChange> regimes() const;

 private:
  int n0_;
  std::vector<double> values_;
  std::vector<UpperBranch> branches_;
};

struct EnvelopePoint {
  int n;
  double lambda;
  double log_prob;
};

/// Smallest c >= 0 placing every point inside the envelope with the
/// template's beta. Throws on empty input, non-finite log_prob, or a point
/// whose width factor is not positive.
double fit_envelope_constant(std::span<const EnvelopePoint> points,
                             const BoundEnvelope& env_template);

}  // namespace sinebeta::bounds
