#ifndef MIXENT_APPLICATIONS_HPP
#define MIXENT_APPLICATIONS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mixent/bounds.hpp"
#include "mixent/density.hpp"
#include "mixent/oracle.hpp"
#include "mixent/special_functions.hpp"

// Section-5 style calculators: Fano comparisons for discrete-input AWGN
// channels, Ozarow-Wyner gaps, Landauer energetics and the log-Sobolev
// deficit bound.

namespace mixent {

/// Discrete constellation plus isotropic Gaussian noise; output Z = X + W.
struct ChannelSpec {
  std::vector<Vec> constellation;
  Vec prior;
  double sigma = 1.0;

  void validate() const {
    if (constellation.size() < 2)
      throw input_error("ChannelSpec: need at least two points");
    if (prior.size() != constellation.size())
      throw input_error("ChannelSpec: prior length mismatch");
    double total = 0.0;
    for (double p : prior) {
      if (!(p > 0.0)) throw input_error("ChannelSpec: prior must be positive");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12)
      throw input_error("ChannelSpec: prior must sum to 1");
    if (!(sigma > 0.0)) throw input_error("ChannelSpec: sigma must be positive");
    for (std::size_t i = 0; i < constellation.size(); ++i)
      for (std::size_t j = i + 1; j < constellation.size(); ++j)
        if (detail::dist(constellation[i], constellation[j]) == 0.0)
          throw input_error("ChannelSpec: points must be distinct");
  }

  /// Half the minimum pairwise distance.
  double lambda() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < constellation.size(); ++i)
      for (std::size_t j = i + 1; j < constellation.size(); ++j)
        best = std::min(best, detail::dist(constellation[i], constellation[j]));
    return 0.5 * best;
  }

  MixtureModel to_mixture() const {
    validate();
    std::vector<ComponentDensity> cs;
    const int d = static_cast<int>(constellation.front().size());
    for (const Vec &x : constellation)
      cs.emplace_back(IsotropicGaussian(d, x, sigma));
    return MixtureModel(prior, std::move(cs));
  }

  static ChannelSpec uniform_grid(int n, double spacing, double sigma) {
    if (n < 2) throw input_error("uniform_grid: N must be >= 2");
    ChannelSpec c;
    c.sigma = sigma;
    for (int i = 1; i <= n; ++i) c.constellation.push_back(Vec{spacing * i});
    c.prior.assign(n, 1.0 / n);
    return c;
  }
};

/// Gaussian bistable well parameters for the erasure energetics.
struct EnergeticsSpec {
  double a = 1.0;
  double sigma = 1.0;
  double p0 = 0.5;
  double p1 = 0.0;
  double kBT = 1.0;

  void validate() const {
    if (!(a > 0.0) || !(sigma > 0.0))
      throw input_error("EnergeticsSpec: a and sigma must be positive");
    if (p0 < 0.0 || p0 > 1.0 || p1 < 0.0 || p1 > 1.0)
      throw input_error("EnergeticsSpec: p0, p1 must lie in [0,1]");
    if (!(kBT > 0.0)) throw input_error("EnergeticsSpec: kBT must be positive");
  }
};

/// Fano right-hand side H(e) + P(e) ln(#X - 1), nats.
inline double fano_rhs(double p_error, int support_size) {
  if (support_size < 2) throw input_error("fano_rhs: support size must be >= 2");
  if (p_error < 0.0 || p_error > 1.0)
    throw input_error("fano_rhs: p_error outside [0,1]");
  return binary_entropy(p_error) +
         p_error * std::log(static_cast<double>(support_size - 1));
}

/// Bayes error of an N-point grid at spacing 2 lambda under Gaussian
/// noise: P(|Z| >= lambda / sigma) (1 - 1/N).
inline double grid_bayes_error(int n, double lambda, double sigma) {
  if (n < 2) throw input_error("grid_bayes_error: N must be >= 2");
  if (!(lambda > 0.0) || !(sigma > 0.0))
    throw input_error("grid_bayes_error: lambda, sigma must be positive");
  return gaussian_tail(1, lambda / sigma) * (1.0 - 1.0 / n);
}

/// Unit-spacing special case: P(|Z| >= 1/(2 sigma)) (1 - 1/N).
inline double uniform_grid_bayes_error(int n, double sigma) {
  return grid_bayes_error(n, 0.5, sigma);
}

/// (1 - T_f) H(p): a floor under every estimator's Fano RHS.
inline BoundReport tv_fano_estimator_bound(const MixtureModel &model,
                                           const QuadratureSpec &spec = {},
                                           const McSpec &mc = {}) {
  const double hp = model.weight_entropy();
  const double tf = mixture_tv_coefficient(model, spec, mc);
  BoundReport r;
  r.kind = BoundKind::gap;
  r.preconditions.emplace_back("n >= 2", model.size() >= 2);
  r.inputs_echo["H_p"] = hp;
  r.inputs_echo["T_f"] = tf;
  r.value = (1.0 - tf) * hp;
  return r;
}

namespace detail {

// B(u, sigma/lambda) = ln[3 e^{u^2 + 3}(1 + sqrt(9 pi / 2) sigma/lambda)].
inline double agwn_log_factor(double lambda, double sigma) {
  const double u = lambda / sigma;
  return std::log(3.0) + u * u + 3.0 +
         std::log1p(std::sqrt(4.5 * M_PI) * sigma / lambda);
}

} // namespace detail

/// N-independent 1-D bound:
/// H(X|X+W) <= ln[3 e^{(lambda/sigma)^2+3}(1 + sqrt(9 pi/2) sigma/lambda)]
///             P(|Z| > lambda/sigma).
inline BoundReport agwn_1d_condentropy_bound(double lambda, double sigma) {
  if (!(lambda > 0.0) || !(sigma > 0.0))
    throw input_error(
        "agwn_1d_condentropy_bound: lambda and sigma must be positive");
  BoundReport r;
  r.kind = BoundKind::conditional_entropy_upper;
  r.preconditions.emplace_back("lambda > 0", true);
  r.inputs_echo["lambda"] = lambda;
  r.inputs_echo["sigma"] = sigma;
  r.value = detail::agwn_log_factor(lambda, sigma) *
            gaussian_tail(1, lambda / sigma);
  return r;
}

/// H(X|Y) <= (M-1) P(|W| <= tau lambda) + J_d P(|W| > lambda) for a
/// Gaussian base, with J_1 taking its own sharper form.
inline BoundReport gaussian_hx_given_y_bound(const SeparationCertificate &cert,
                                             double sigma, int d,
                                             bool certificate_verified = true) {
  if (d < 1) throw input_error("gaussian_hx_given_y_bound: d must be >= 1");
  if (!(sigma > 0.0))
    throw input_error("gaussian_hx_given_y_bound: sigma must be positive");
  const double lam = cert.lambda, tau = cert.tau;
  const int m = cert.m;
  const double u = lam / sigma;
  double j;
  if (d == 1) {
    j = u * u + m + 2.0 + std::log(tau * m) +
        std::log(1.0 + tau + tau * tau + tau * tau * sigma / (lam * lam)) +
        std::log1p(std::sqrt(4.5 * M_PI) * sigma / lam);
  } else {
    const double omega = unit_ball_volume(d);
    j = u * u + m + d * (1.0 + std::log(tau)) + std::log(static_cast<double>(m)) +
        d * std::log(1.0 + tau + tau * tau + tau * tau * sigma * d / lam) +
        std::log1p(std::pow(3.0 * std::sqrt(2.0 * M_PI) * sigma / lam, d) /
                   omega);
  }
  const double p_in = 1.0 - gaussian_tail(d, tau * lam / sigma);
  const double p_out = gaussian_tail(d, u);
  BoundReport r;
  r.kind = BoundKind::conditional_entropy_upper;
  r.preconditions.emplace_back("certificate verified", certificate_verified);
  r.inputs_echo["lambda"] = lam;
  r.inputs_echo["tau"] = tau;
  r.inputs_echo["M"] = m;
  r.inputs_echo["d"] = d;
  r.inputs_echo["sigma"] = sigma;
  r.inputs_echo["J"] = j;
  r.value = (m - 1) * p_in + j * p_out;
  return r;
}

/// Ozarow-Wyner gap p_o H(X) + h(p_o) for N evenly spaced points at
/// spacing 2 lambda, unit-variance noise (general sigma via lambda/sigma).
inline BoundReport ozarow_wyner_bound(int n, double lambda, double sigma = 1.0) {
  if (n < 2) throw input_error("ozarow_wyner_bound: N must be >= 2");
  if (!(lambda > 0.0) || !(sigma > 0.0))
    throw input_error("ozarow_wyner_bound: lambda, sigma must be positive");
  const double lam = lambda / sigma;
  const double k = 0.5 * lam * lam * (1.0 - 1.0 / (n * static_cast<double>(n)));
  if (!(k > 0.0)) throw input_error("ozarow_wyner_bound: K must be positive");
  const double hx = std::log(static_cast<double>(n));
  double p_o = std::exp(-k) / std::sqrt(M_PI * k);
  BoundReport r;
  r.kind = BoundKind::gap;
  r.preconditions.emplace_back("K > 0", true);
  if (p_o > 1.0) {
    p_o = 1.0;
    r.clamped = true;
  }
  const double var_term = 1.0 + lam * lam * (n * static_cast<double>(n) - 1.0) / 3.0;
  const double c = 0.5 * std::log(var_term);
  const double alpha = n / std::sqrt(var_term);
  const double rate2 = c - 0.5 * std::log(M_PI * M_E / 6.0) -
                       0.5 * std::log((1.0 + alpha * alpha) / (alpha * alpha));
  r.inputs_echo["N"] = n;
  r.inputs_echo["lambda"] = lambda;
  r.inputs_echo["sigma"] = sigma;
  r.inputs_echo["K"] = k;
  r.inputs_echo["p_o"] = p_o;
  r.inputs_echo["H_X"] = hx;
  r.inputs_echo["second_form_gap"] = hx - rate2;
  r.value = p_o * hx + binary_entropy(p_o);
  return r;
}

/// Energy band around kBT (H(p0) - H(p1)) for the optimal erasure protocol.
struct LandauerBand {
  double lower = 0.0;
  double upper = 0.0;
  double central = 0.0;
  double log_factor = 0.0;
  double tail = 0.0;
};

inline LandauerBand landauer_bounds(const EnergeticsSpec &spec) {
  spec.validate();
  const double b = detail::agwn_log_factor(spec.a, spec.sigma);
  const double p = gaussian_tail(1, spec.a / spec.sigma);
  const double h0 = binary_entropy(spec.p0);
  const double h1 = binary_entropy(spec.p1);
  LandauerBand band;
  band.central = spec.kBT * (h0 - h1);
  band.log_factor = b;
  band.tail = p;
  band.lower = band.central - spec.kBT * (b - h1) * p;
  band.upper = band.central + spec.kBT * (b - h0) * p;
  return band;
}

/// The two-well mixture (1-p) N(a, sigma^2) + p N(-a, sigma^2); degenerate
/// p collapses to a single Gaussian.
inline MixtureModel bistable_mixture(double p, double a, double sigma) {
  if (p <= 0.0)
    return MixtureModel(Vec{1.0}, {ComponentDensity(
                                      IsotropicGaussian(1, Vec{a}, sigma))});
  if (p >= 1.0)
    return MixtureModel(Vec{1.0}, {ComponentDensity(
                                      IsotropicGaussian(1, Vec{-a}, sigma))});
  return MixtureModel(
      Vec{1.0 - p, p},
      {ComponentDensity(IsotropicGaussian(1, Vec{a}, sigma)),
       ComponentDensity(IsotropicGaussian(1, Vec{-a}, sigma))});
}

/// Oracle heat kBT (I(Z_{p0}; X_{p0}) - I(Z_{p1}; X_{p1})) by quadrature.
inline double landauer_oracle_heat(const EnergeticsSpec &spec,
                                   const QuadratureSpec &quad = {}) {
  spec.validate();
  auto mi = [&](double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return concavity_deficit(bistable_mixture(p, spec.a, spec.sigma), quad)
        .value;
  };
  return spec.kBT * (mi(spec.p0) - mi(spec.p1));
}

/// Log-Sobolev deficit bound delta <= T_f H(p) for translates of the
/// standard Gaussian.
inline BoundReport lsi_deficit_bound(const MixtureModel &model,
                                     const QuadratureSpec &spec = {},
                                     const McSpec &mc = {}) {
  bool unit = true;
  for (const auto &c : model.components())
    if (!c.is_gaussian() || std::fabs(c.gaussian().sigma - 1.0) > 0.0)
      unit = false;
  BoundReport r;
  r.kind = BoundKind::upper_deficit;
  r.preconditions.emplace_back("unit-variance Gaussian components", unit);
  r.inputs_echo["n"] = model.size();
  const double hp = model.weight_entropy();
  r.inputs_echo["H_p"] = hp;
  if (!unit) {
    r.value = 0.0;
    return r;
  }
  if (model.size() < 2) {
    r.value = 0.0;
    return r;
  }
  const double tf = mixture_tv_coefficient(model, spec, mc);
  r.inputs_echo["T_f"] = tf;
  r.value = tf * hp;
  return r;
}

/// d = 1 oracle for the log-Sobolev deficit: I(mu||gamma)/2 - D(mu||gamma)
/// with the relative Fisher information from the analytic mixture score.
inline double lsi_deficit_oracle_1d(const MixtureModel &model,
                                    const QuadratureSpec &spec = {}) {
  if (model.dim() != 1)
    throw unsupported_error("lsi_deficit_oracle_1d: d = 1 only");
  for (const auto &c : model.components())
    if (!c.is_gaussian() || std::fabs(c.gaussian().sigma - 1.0) > 0.0)
      throw input_error(
          "lsi_deficit_oracle_1d: components must be unit Gaussians");
  Vec lo, hi;
  model.bounding_box(lo, hi);

  // score of mu: mu'(x)/mu(x) = -sum_i w_i(x) (x - m_i) with posterior w_i
  auto score = [&model](double x) {
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> lt(model.size());
    for (int i = 0; i < model.size(); ++i) {
      lt[i] = std::log(model.weights()[i]) +
              model.component(i).log_pdf(Vec{x});
      max_term = std::max(max_term, lt[i]);
    }
    double den = 0.0, num = 0.0;
    for (int i = 0; i < model.size(); ++i) {
      const double w = std::exp(lt[i] - max_term);
      den += w;
      num += w * (x - model.component(i).gaussian().mean[0]);
    }
    return -num / den;
  };

  const double log_gamma_norm = -0.5 * std::log(2.0 * M_PI);
  auto fisher_fn = [&](double x) {
    const double mu = std::exp(model.log_pdf(Vec{x}));
    if (mu < 1e-300) return 0.0;
    const double g = score(x) + x; // d/dx ln(dmu/dgamma)
    return g * g * mu;
  };
  auto kl_fn = [&](double x) {
    const double lmu = model.log_pdf(Vec{x});
    const double mu = std::exp(lmu);
    if (mu < 1e-300) return 0.0;
    const double lgam = log_gamma_norm - 0.5 * x * x;
    return mu * (lmu - lgam);
  };
  const double fisher = integrate_1d(fisher_fn, lo[0], hi[0], spec).value;
  const double kl_val = integrate_1d(kl_fn, lo[0], hi[0], spec).value;
  return 0.5 * fisher - kl_val;
}

} // namespace mixent

#endif
