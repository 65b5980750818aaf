#ifndef MIXENT_BOUNDS_HPP
#define MIXENT_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mixent/density.hpp"
#include "mixent/divergence.hpp"
#include "mixent/mc.hpp"
#include "mixent/quadrature.hpp"
#include "mixent/special_functions.hpp"

// Bound formulas: the total-variation upper bound on the concavity deficit
// and the separation-based lower-bound machinery, each as a BoundReport.

namespace mixent {

enum class BoundKind {
  upper_deficit,
  lower_deficit,
  conditional_entropy_upper,
  tail,
  gap
};

inline const char *bound_kind_name(BoundKind k) {
  switch (k) {
  case BoundKind::upper_deficit: return "upper_deficit";
  case BoundKind::lower_deficit: return "lower_deficit";
  case BoundKind::conditional_entropy_upper: return "conditional_entropy_upper";
  case BoundKind::tail: return "tail";
  case BoundKind::gap: return "gap";
  }
  return "?";
}

/// A bound value plus the preconditions it rests on and the inputs used.
/// A report with any unmet precondition is non-binding.
struct BoundReport {
  double value = 0.0;
  std::vector<std::pair<std::string, bool>> preconditions;
  std::map<std::string, double> inputs_echo;
  BoundKind kind = BoundKind::upper_deficit;
  bool clamped = false;

  bool binding() const {
    for (const auto &p : preconditions)
      if (!p.second) return false;
    return true;
  }
};

enum class TailKind { gaussian, log_concave_generic, strongly_log_concave };

/// Radial tail function T(t) = P(|W| > t) of a noise model with per-axis
/// standard deviation sigma in R^d.
struct TailModel {
  TailKind kind = TailKind::gaussian;
  int d = 1;
  double sigma = 1.0;

  void validate() const {
    if (d < 1) throw input_error("TailModel: dimension must be >= 1");
    if (!(sigma > 0.0)) throw input_error("TailModel: sigma must be positive");
  }

  double tail(double t) const {
    validate();
    if (t <= 0.0) return 1.0;
    if (kind == TailKind::gaussian) return gaussian_tail(d, t / sigma);
    // non-Gaussian kinds fall back to the LS93 envelope, certified only
    // beyond the Chebyshev anchor t0 = sqrt(2 d sigma^2)
    const double t0 = std::sqrt(2.0 * d * sigma * sigma);
    if (t < t0) return 1.0;
    const double c = std::log(2.0) / (2.0 * t0);
    return std::min(1.0, std::exp(-0.5 * std::log(2.0)) * std::exp(-c * t));
  }
};

/// sup_i || f_i - f~_i ||_TV over mixture complements.
inline double mixture_tv_coefficient(const MixtureModel &model,
                                     const QuadratureSpec &spec = {},
                                     const McSpec &mc = {}) {
  if (model.size() < 2)
    throw input_error("mixture_tv_coefficient: needs n >= 2");
  double worst = 0.0;
  for (int i = 0; i < model.size(); ++i) {
    DensityPair pair(DensityRef::from(model.component(i)),
                     DensityRef::from(model.mixture_complement(i)));
    McSpec mci = mc;
    mci.seed = mc.seed + static_cast<std::uint64_t>(i);
    worst = std::max(worst, total_variation(pair, spec, mci).value);
  }
  return worst;
}

/// Deficit upper bound min(T_f H(p), H(p)).
inline BoundReport deficit_upper_tv(const MixtureModel &model,
                                    const QuadratureSpec &spec = {},
                                    const McSpec &mc = {}) {
  const double hp = model.weight_entropy();
  const double tf = mixture_tv_coefficient(model, spec, mc);
  BoundReport r;
  r.kind = BoundKind::upper_deficit;
  r.preconditions.emplace_back("n >= 2", model.size() >= 2);
  r.inputs_echo["n"] = model.size();
  r.inputs_echo["H_p"] = hp;
  r.inputs_echo["T_f"] = tf;
  r.value = std::min(tf * hp, hp);
  return r;
}

/// K(phi) for a spherically symmetric base: the Fano-sharpening tail
/// functional, with the radial integral reduced to one dimension.
inline double k_phi(const RadialProfile &base, int d, double lambda,
                    double tau, int m, double eps,
                    const QuadratureSpec &spec = {}) {
  if (!(lambda > 0.0) || !(eps > 0.0))
    throw input_error("k_phi: lambda and eps must be positive");
  if (!(tau >= 1.0)) throw input_error("k_phi: tau must be >= 1");
  if (m < 1) throw input_error("k_phi: M must be >= 1");
  if (base.dim != d) throw input_error("k_phi: base dimension mismatch");
  const double omega = unit_ball_volume(d);
  const double log_factor =
      std::log(std::pow(tau, d) * m *
               (base.sup + std::pow(3.0 / eps, d) / omega));
  const double tail = base.tail(lambda);
  const double surf = d * omega;
  auto integrand = [&](double r) {
    const double lg = std::log1p((eps * tau + tau * tau * r) / lambda);
    return surf * std::pow(r, d - 1) * std::exp(base.log_psi(r)) * lg * lg;
  };
  const Estimate shell = integrate_1d(
      integrand, lambda, std::numeric_limits<double>::infinity(), spec);
  return log_factor * std::sqrt(tail) +
         d * std::sqrt(std::max(0.0, shell.value));
}

/// C~(W) = (M-1)(1 - T(lambda tau)) + T(lambda)(M + h(W))
///         + T(lambda)^{1/2} (sqrt(d) + K(phi)).
inline BoundReport c_tilde(const TailModel &tail, double h_base, double k,
                           double lambda, double tau, int m, int d,
                           bool certificate_verified = true) {
  tail.validate();
  if (!(lambda > 0.0)) throw input_error("c_tilde: lambda must be positive");
  const double t_lam = tail.tail(lambda);
  const double t_lamtau = tail.tail(lambda * tau);
  BoundReport r;
  r.kind = BoundKind::gap;
  r.preconditions.emplace_back("certificate verified", certificate_verified);
  r.inputs_echo["lambda"] = lambda;
  r.inputs_echo["tau"] = tau;
  r.inputs_echo["M"] = m;
  r.inputs_echo["d"] = d;
  r.inputs_echo["sigma"] = tail.sigma;
  r.inputs_echo["h_base"] = h_base;
  r.inputs_echo["K_phi"] = k;
  r.value = (m - 1) * (1.0 - t_lamtau) + t_lam * (m + h_base) +
            std::sqrt(t_lam) * (std::sqrt(static_cast<double>(d)) + k);
  return r;
}

/// The common radial base of all mixture components.
inline RadialProfile common_base_profile(const MixtureModel &model) {
  detail::require_common_base(model);
  const ComponentDensity &c = model.component(0);
  if (c.is_gaussian())
    return RadialProfile::std_gaussian(model.dim(), c.gaussian().sigma);
  return c.pushforward().base;
}

/// Lower bound H(p) - C~(W) on the concavity deficit, clamped below at 0.
inline BoundReport deficit_lower(const MixtureModel &model,
                                 const SeparationCertificate &cert,
                                 const QuadratureSpec &spec = {}) {
  BoundReport r;
  r.kind = BoundKind::lower_deficit;
  const double hp = model.weight_entropy();
  r.inputs_echo["H_p"] = hp;
  r.inputs_echo["lambda"] = cert.lambda;
  r.inputs_echo["tau"] = cert.tau;
  r.inputs_echo["M"] = cert.m;
  r.inputs_echo["d"] = model.dim();

  if (model.size() < 2) {
    r.preconditions.emplace_back("certificate verified", true);
    r.value = 0.0;
    r.clamped = true;
    return r;
  }

  bool verified = false;
  try {
    verified = verify_separation(model, cert);
  } catch (const unsupported_error &) {
    verified = false;
  }
  r.preconditions.emplace_back("certificate verified", verified);
  if (!verified) {
    r.value = 0.0;
    r.clamped = true;
    return r;
  }

  const RadialProfile base = common_base_profile(model);
  const double h_base = base.entropy ? *base.entropy : 0.0;
  r.preconditions.emplace_back("base entropy known",
                               static_cast<bool>(base.entropy));
  const double k =
      k_phi(base, model.dim(), cert.lambda, cert.tau, cert.m, cert.lambda,
            spec);
  TailModel tail;
  tail.kind = base.gaussian ? TailKind::gaussian : TailKind::log_concave_generic;
  tail.d = model.dim();
  tail.sigma = base.gaussian
                   ? base.sigma
                   : (base.coord_variance ? std::sqrt(*base.coord_variance)
                                          : 1.0);
  const BoundReport ct = c_tilde(tail, h_base, k, cert.lambda, cert.tau,
                                 cert.m, model.dim());
  r.inputs_echo["C_tilde"] = ct.value;
  r.inputs_echo["K_phi"] = k;
  r.value = hp - ct.value;
  if (r.value < 0.0) {
    r.value = 0.0;
    r.clamped = true;
  }
  return r;
}

/// Well-spaced sum bound M(||phi||_inf + (3/lambda)^d / omega_d).
inline double well_spaced_sum_bound(const RadialProfile &profile,
                                    double lambda, int m, int d) {
  if (!(lambda > 0.0))
    throw input_error("well_spaced_sum_bound: lambda must be positive");
  if (m < 1) throw input_error("well_spaced_sum_bound: M must be >= 1");
  return m * (profile.sup + std::pow(3.0 / lambda, d) / unit_ball_volume(d));
}

/// Ball-counting bound M((lambda + eps + 2 tau |w|) / lambda)^d.
inline double counting_bound(double lambda, double eps, double tau, int m,
                             double w_norm, int d) {
  if (!(lambda > 0.0) || !(eps > 0.0))
    throw input_error("counting_bound: lambda and eps must be positive");
  if (w_norm < 0.0)
    throw input_error("counting_bound: |w| must be nonnegative");
  return m * std::pow((lambda + eps + 2.0 * tau * w_norm) / lambda, d);
}

/// LS93 envelope min(1, 2^{-1/2} e^{-ct}), c = ln 2 / (2 sqrt(2 d sigma^2)).
inline double log_concave_tail(const TailModel &model, double t) {
  model.validate();
  if (t < 0.0) throw input_error("log_concave_tail: t must be nonnegative");
  const double t0 = std::sqrt(2.0 * model.d * model.sigma * model.sigma);
  if (t < t0) return 1.0; // envelope certified only past the anchor
  const double c = std::log(2.0) / (2.0 * t0);
  return std::min(1.0, std::exp(-0.5 * std::log(2.0) - c * t));
}

/// Whether the model's tail at t is dominated by the standard Gaussian tail.
inline bool strong_lc_tail_dominates(const TailModel &model, double t) {
  if (model.kind != TailKind::strongly_log_concave)
    throw input_error(
        "strong_lc_tail_dominates: model must be strongly log-concave");
  TailModel exact = model;
  exact.kind = TailKind::gaussian;
  return exact.tail(t) <= gaussian_tail(model.d, t) + 1e-15;
}

/// Varentropy: the variance of -ln phi(X).
inline Estimate varentropy(const ComponentDensity &c,
                           const QuadratureSpec &spec = {},
                           const McSpec &mc = {}) {
  const double h = c.entropy();
  const int d = c.dim();
  if (d <= 2) {
    const Vec ctr = c.center();
    const double e = c.extent();
    if (d == 1) {
      auto fn = [&](double x) {
        const Vec z{x};
        const double lp = c.log_pdf(z);
        const double p = std::exp(lp);
        if (p < 1e-300) return 0.0;
        const double s = -lp - h;
        return s * s * p;
      };
      return integrate_1d(fn, ctr[0] - e, ctr[0] + e, spec);
    }
    auto fn = [&](double x, double y) {
      const Vec z{x, y};
      const double lp = c.log_pdf(z);
      const double p = std::exp(lp);
      if (p < 1e-300) return 0.0;
      const double s = -lp - h;
      return s * s * p;
    };
    return integrate_2d(fn, ctr[0] - e, ctr[0] + e, ctr[1] - e, ctr[1] + e,
                        spec);
  }
  Sampler sampler = [&c](CounterRng &rng) { return c.sample(rng); };
  auto fn = [&c, h](const Vec &z) {
    const double s = -c.log_pdf(z) - h;
    return s * s;
  };
  return mc_expectation(sampler, fn, mc);
}

/// Appendix entropy-tail bound, d >= 2:
/// (d/2 ln(2 pi e^2 sigma^2) + lambda^2/sigma^2) P(|W| > lambda).
inline double gaussian_entropy_tail(int d, double sigma, double lambda) {
  if (d < 2) throw input_error("gaussian_entropy_tail: needs d >= 2");
  if (!(sigma > 0.0) || !(lambda > 0.0))
    throw input_error("gaussian_entropy_tail: sigma, lambda must be positive");
  const double u = lambda / sigma;
  return (0.5 * d * std::log(2.0 * M_PI * M_E * M_E * sigma * sigma) +
          u * u) *
         gaussian_tail(d, u);
}

/// d = 1 form: (lambda^2/sigma^2 + 2 + ln(sqrt(2 pi) sigma)) P(|W| > lambda).
inline double gaussian_entropy_tail_1d(double sigma, double lambda) {
  if (!(sigma > 0.0) || !(lambda > 0.0))
    throw input_error(
        "gaussian_entropy_tail_1d: sigma, lambda must be positive");
  const double u = lambda / sigma;
  return (u * u + 2.0 + std::log(std::sqrt(2.0 * M_PI) * sigma)) *
         gaussian_tail(1, u);
}

/// Appendix norm-tail bound, d >= 2: (lambda + d sigma) P(|W| > lambda).
inline double gaussian_norm_tail(int d, double sigma, double lambda) {
  if (d < 2) throw input_error("gaussian_norm_tail: needs d >= 2");
  if (!(sigma > 0.0) || lambda < 0.0)
    throw input_error("gaussian_norm_tail: bad sigma or lambda");
  return (lambda + d * sigma) * gaussian_tail(d, lambda / sigma);
}

} // namespace mixent

#endif
