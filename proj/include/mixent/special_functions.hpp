#ifndef MIXENT_SPECIAL_FUNCTIONS_HPP
#define MIXENT_SPECIAL_FUNCTIONS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

// Special functions used throughout the library.  Everything here is
// self-contained: log-gamma is a Lanczos approximation, the regularized
// incomplete gamma functions use the usual series / continued-fraction
// crossover, and erf/erfc are derived from them.

namespace mixent {

class input_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

// Lanczos, g = 7, n = 9.
inline double log_gamma(double x) {
  static const double coef[9] = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // reflection
    return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
  }
  x -= 1.0;
  double a = coef[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
  return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

// Lower regularized incomplete gamma by series, valid for x < s + 1.
inline double gamma_p_series(double s, double x) {
  double ap = s;
  double sum = 1.0 / s;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + s * std::log(x) - log_gamma(s));
}

// Upper regularized incomplete gamma by Lentz continued fraction, x >= s + 1.
inline double gamma_q_cf(double s, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + s * std::log(x) - log_gamma(s));
}

} // namespace detail

/// Regularized upper incomplete gamma Q(s, x) = Gamma(s,x)/Gamma(s).
inline double reg_upper_gamma(double s, double x) {
  if (!(s > 0.0)) throw input_error("reg_upper_gamma: s must be positive");
  if (x < 0.0) throw input_error("reg_upper_gamma: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - detail::gamma_p_series(s, x);
  return detail::gamma_q_cf(s, x);
}

/// Regularized lower incomplete gamma P(s, x) = 1 - Q(s, x).
inline double reg_lower_gamma(double s, double x) {
  if (!(s > 0.0)) throw input_error("reg_lower_gamma: s must be positive");
  if (x < 0.0) throw input_error("reg_lower_gamma: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) return detail::gamma_p_series(s, x);
  return 1.0 - detail::gamma_q_cf(s, x);
}

inline double erfc_own(double x) {
  if (x >= 0.0) return reg_upper_gamma(0.5, x * x);
  return 2.0 - reg_upper_gamma(0.5, x * x);
}

inline double erf_own(double x) {
  if (x == 0.0) return 0.0;
  const double p = reg_lower_gamma(0.5, x * x);
  return x > 0.0 ? p : -p;
}

/// Standard normal CDF.
inline double std_normal_cdf(double t) {
  if (t >= 0.0) return 1.0 - 0.5 * erfc_own(t / M_SQRT2);
  return 0.5 * erfc_own(-t / M_SQRT2);
}

/// P(|Z| > t) for a standard d-dimensional Gaussian vector Z.
inline double gaussian_tail(int d, double t) {
  if (d < 1) throw input_error("gaussian_tail: dimension must be >= 1");
  if (t < 0.0) throw input_error("gaussian_tail: t must be nonnegative");
  if (t == 0.0) return 1.0;
  return reg_upper_gamma(0.5 * d, 0.5 * t * t);
}

/// Volume of the d-dimensional unit ball.
inline double unit_ball_volume(int d) {
  if (d < 1) throw input_error("unit_ball_volume: dimension must be >= 1");
  return std::exp(0.5 * d * std::log(M_PI) - detail::log_gamma(0.5 * d + 1.0));
}

/// Binary entropy in nats, with the 0 log 0 = 0 convention.
inline double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw input_error("binary_entropy: p outside [0,1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

} // namespace mixent

#endif
