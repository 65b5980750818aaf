#ifndef MIXENT_DIVERGENCE_HPP
#define MIXENT_DIVERGENCE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixent/density.hpp"
#include "mixent/mc.hpp"
#include "mixent/quadrature.hpp"

// f-divergences and their skewed variants.  Evaluation is quadrature for
// d <= 2 and Monte Carlo (sampling from the first argument) for d > 2.

namespace mixent {

/// Type-erased density with everything divergence integrals need.
struct DensityRef {
  int dim = 1;
  std::function<double(const Vec &)> log_pdf;
  Sampler sampler; // may be empty when MC is not needed
  Vec box_lo, box_hi;
  bool is_gaussian = false; // closed-form TV shortcut metadata
  Vec g_mean;
  double g_sigma = 0.0;

  double pdf(const Vec &z) const { return std::exp(log_pdf(z)); }

  static DensityRef from(const ComponentDensity &c) {
    DensityRef r;
    r.dim = c.dim();
    if (c.is_gaussian()) {
      r.is_gaussian = true;
      r.g_mean = c.gaussian().mean;
      r.g_sigma = c.gaussian().sigma;
    }
    r.log_pdf = [c](const Vec &z) { return c.log_pdf(z); };
    r.sampler = [c](CounterRng &rng) { return c.sample(rng); };
    const Vec ctr = c.center();
    const double e = c.extent();
    r.box_lo.resize(r.dim);
    r.box_hi.resize(r.dim);
    for (int k = 0; k < r.dim; ++k) {
      r.box_lo[k] = ctr[k] - e;
      r.box_hi[k] = ctr[k] + e;
    }
    return r;
  }

  static DensityRef from(const MixtureModel &m) {
    DensityRef r;
    r.dim = m.dim();
    if (m.size() == 1 && m.component(0).is_gaussian()) {
      r.is_gaussian = true;
      r.g_mean = m.component(0).gaussian().mean;
      r.g_sigma = m.component(0).gaussian().sigma;
    }
    auto shared = std::make_shared<MixtureModel>(m);
    r.log_pdf = [shared](const Vec &z) { return shared->log_pdf(z); };
    r.sampler = [shared](CounterRng &rng) { return shared->sample(rng); };
    shared->bounding_box(r.box_lo, r.box_hi);
    return r;
  }

  static DensityRef uniform_1d(double a, double b) {
    if (!(a < b)) throw input_error("uniform_1d: need a < b");
    DensityRef r;
    r.dim = 1;
    const double logv = -std::log(b - a);
    r.log_pdf = [a, b, logv](const Vec &z) {
      return (z[0] >= a && z[0] <= b)
                 ? logv
                 : -std::numeric_limits<double>::infinity();
    };
    r.sampler = [a, b](CounterRng &rng) {
      return Vec{a + (b - a) * rng.next_double()};
    };
    r.box_lo = {a};
    r.box_hi = {b};
    return r;
  }
};

/// Two densities on a common R^d.
struct DensityPair {
  DensityRef mu, nu;

  DensityPair(DensityRef m, DensityRef n) : mu(std::move(m)), nu(std::move(n)) {
    if (mu.dim != nu.dim)
      throw input_error("DensityPair: dimension mismatch");
  }

  int dim() const { return mu.dim; }

  void union_box(Vec &lo, Vec &hi) const {
    lo.resize(dim());
    hi.resize(dim());
    for (int k = 0; k < dim(); ++k) {
      lo[k] = std::min(mu.box_lo[k], nu.box_lo[k]);
      hi[k] = std::max(mu.box_hi[k], nu.box_hi[k]);
    }
  }
};

/// Convex generator f with f(1) = 0 for D_f.
struct ConvexGenerator {
  std::function<double(double)> f;
  std::string label;

  // f(1) = 0 and midpoint convexity on a grid in (0, 10].
  void validate() const {
    if (std::fabs(f(1.0)) > 1e-12)
      throw input_error("ConvexGenerator '" + label + "': f(1) != 0");
    for (double x = 0.05; x <= 10.0; x += 0.35)
      for (double y = x + 0.1; y <= 10.0; y += 0.85) {
        const double mid = f(0.5 * (x + y));
        if (mid > 0.5 * (f(x) + f(y)) + 1e-9)
          throw input_error("ConvexGenerator '" + label +
                            "': midpoint convexity violated");
      }
  }
};

namespace detail {

constexpr double kDensityFloor = 1e-300;

// Integrate a pointwise functional of (u, v) over the union box;
// non-domination (v = 0 where u > 0 and the term needs v) flips *infinite.
inline Estimate integrate_pair(
    const DensityPair &pair,
    const std::function<double(double, double, bool *)> &term,
    const QuadratureSpec &spec, bool *infinite) {
  Vec lo, hi;
  pair.union_box(lo, hi);
  *infinite = false;
  if (pair.dim() == 1) {
    auto fn = [&](double x) {
      const Vec z{x};
      return term(pair.mu.pdf(z), pair.nu.pdf(z), infinite);
    };
    // Split at each density's box edges and center so a peak that is narrow
    // relative to the union box cannot slip between the initial panel nodes.
    std::vector<double> cuts{lo[0], hi[0]};
    for (const DensityRef *d : {&pair.mu, &pair.nu}) {
      cuts.push_back(d->box_lo[0]);
      cuts.push_back(d->box_hi[0]);
      cuts.push_back(0.5 * (d->box_lo[0] + d->box_hi[0]));
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> pts;
    for (double c : cuts)
      if (c >= lo[0] && c <= hi[0] &&
          (pts.empty() || c - pts.back() > 1e-12 * (hi[0] - lo[0])))
        pts.push_back(c);
    if (pts.size() < 2) pts = {lo[0], hi[0]};
    QuadratureSpec seg = spec;
    seg.abs_tol = spec.abs_tol / static_cast<double>(pts.size() - 1);
    Estimate out;
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
      const Estimate e = integrate_1d(fn, pts[k], pts[k + 1], seg);
      out.value += e.value;
      out.error += e.error;
    }
    return out;
  }
  if (pair.dim() == 2) {
    auto fn = [&](double x, double y) {
      const Vec z{x, y};
      return term(pair.mu.pdf(z), pair.nu.pdf(z), infinite);
    };
    return integrate_2d(fn, lo[0], hi[0], lo[1], hi[1], spec);
  }
  throw unsupported_error("integrate_pair: quadrature limited to d <= 2");
}

inline Estimate mc_pair(
    const DensityPair &pair,
    const std::function<double(const Vec &)> &fn, const McSpec &mc) {
  if (!pair.mu.sampler)
    throw unsupported_error("divergence MC: first argument has no sampler");
  return mc_expectation(pair.mu.sampler, fn, mc);
}

inline Estimate infinite_estimate() {
  return Estimate{std::numeric_limits<double>::infinity(), 0.0,
                  EstimateMethod::quadrature, 0};
}

} // namespace detail

/// KL divergence D(mu || nu) in nats.
inline Estimate kl(const DensityPair &pair, const QuadratureSpec &spec = {},
                   const McSpec &mc = {}) {
  if (pair.dim() <= 2) {
    bool infinite = false;
    auto term = [](double u, double v, bool *inf_flag) {
      if (u < detail::kDensityFloor) return 0.0;
      if (v < detail::kDensityFloor) {
        *inf_flag = true;
        return 0.0;
      }
      return u * std::log(u / v);
    };
    Estimate e = detail::integrate_pair(pair, term, spec, &infinite);
    return infinite ? detail::infinite_estimate() : e;
  }
  auto fn = [&pair](const Vec &z) {
    return pair.mu.log_pdf(z) - pair.nu.log_pdf(z);
  };
  return detail::mc_pair(pair, fn, mc);
}

/// Total variation distance, in [0, 1].  Equal-sigma isotropic Gaussian
/// pairs use the closed form 2 Phi(delta / 2 sigma) - 1.
inline Estimate total_variation(const DensityPair &pair,
                                const QuadratureSpec &spec = {},
                                const McSpec &mc = {}) {
  if (pair.mu.is_gaussian && pair.nu.is_gaussian &&
      pair.mu.g_sigma == pair.nu.g_sigma) {
    const double delta = detail::dist(pair.mu.g_mean, pair.nu.g_mean);
    const double v =
        2.0 * std_normal_cdf(0.5 * delta / pair.mu.g_sigma) - 1.0;
    return Estimate{v, 0.0, EstimateMethod::quadrature, 0};
  }
  if (pair.dim() <= 2) {
    bool infinite = false;
    auto term = [](double u, double v, bool *) {
      return 0.5 * std::fabs(u - v);
    };
    Estimate e = detail::integrate_pair(pair, term, spec, &infinite);
    e.value = std::clamp(e.value, 0.0, 1.0);
    return e;
  }
  // sample from the even blend: TV = E_{(u+v)/2} |u - v| / (u + v)
  Sampler blend = [s1 = pair.mu.sampler, s2 = pair.nu.sampler](CounterRng &r) {
    return r.next_double() < 0.5 ? s1(r) : s2(r);
  };
  auto fn = [&pair](const Vec &z) {
    const double u = pair.mu.pdf(z), v = pair.nu.pdf(z);
    const double s = u + v;
    return s > 0.0 ? std::fabs(u - v) / s : 0.0;
  };
  if (!pair.mu.sampler || !pair.nu.sampler)
    throw unsupported_error("total_variation MC: samplers required");
  Estimate e = mc_expectation(blend, fn, mc);
  e.value = std::clamp(e.value, 0.0, 1.0);
  return e;
}

inline double gaussian_pair_tv(const IsotropicGaussian &a,
                               const IsotropicGaussian &b) {
  if (a.sigma != b.sigma)
    throw input_error("gaussian_pair_tv: sigmas must match");
  const double delta = detail::dist(a.mean, b.mean);
  return 2.0 * std_normal_cdf(0.5 * delta / a.sigma) - 1.0;
}

/// Skew relative information S_t(mu || nu) = D(mu || t mu + (1-t) nu).
inline Estimate skew_divergence(const DensityPair &pair, double t,
                                const QuadratureSpec &spec = {},
                                const McSpec &mc = {}) {
  if (t < 0.0 || t > 1.0)
    throw input_error("skew_divergence: t outside [0,1]");
  if (t == 1.0) return Estimate{0.0, 0.0, EstimateMethod::quadrature, 0};
  if (t == 0.0) return kl(pair, spec, mc);
  if (pair.dim() <= 2) {
    bool infinite = false;
    auto term = [t](double u, double v, bool *) {
      if (u < detail::kDensityFloor) return 0.0;
      const double blend = t * u + (1.0 - t) * v;
      return u * std::log(u / blend); // blend >= t u > 0 here
    };
    Estimate e = detail::integrate_pair(pair, term, spec, &infinite);
    return e;
  }
  auto fn = [&pair, t](const Vec &z) {
    const double lu = pair.mu.log_pdf(z);
    const double lv = pair.nu.log_pdf(z);
    const double m = std::max(lu + std::log(t), lv + std::log(1.0 - t));
    const double lblend =
        m + std::log(std::exp(lu + std::log(t) - m) +
                     std::exp(lv + std::log(1.0 - t) - m));
    return lu - lblend;
  };
  return detail::mc_pair(pair, fn, mc);
}

/// Skew chi-squared: integral of (u - v)^2 / (t u + (1-t) v).
/// chi2_0 is Pearson, chi2_1 is Neyman.
inline Estimate skew_chi2(const DensityPair &pair, double t,
                          const QuadratureSpec &spec = {},
                          const McSpec &mc = {}) {
  if (t < 0.0 || t > 1.0) throw input_error("skew_chi2: t outside [0,1]");
  if (pair.dim() <= 2) {
    auto term = [t](double u, double v, bool *inf_flag) {
      const double num = (u - v) * (u - v);
      if (num == 0.0) return 0.0;
      const double den = t * u + (1.0 - t) * v;
      if (den < detail::kDensityFloor) {
        if (num > detail::kDensityFloor) *inf_flag = true;
        return 0.0;
      }
      return num / den;
    };
    bool infinite = false;
    Estimate e = detail::integrate_pair(pair, term, spec, &infinite);
    return infinite ? detail::infinite_estimate() : e;
  }
  // MC from the skew blend itself: chi2_t = E_blend [((u - v)/blend)^2]
  if (t <= 0.0 || t >= 1.0)
    throw unsupported_error("skew_chi2 MC: endpoints need quadrature");
  Sampler blend = [t, s1 = pair.mu.sampler, s2 = pair.nu.sampler](
                      CounterRng &r) {
    return r.next_double() < t ? s1(r) : s2(r);
  };
  auto fn = [&pair, t](const Vec &z) {
    const double u = pair.mu.pdf(z), v = pair.nu.pdf(z);
    const double den = t * u + (1.0 - t) * v;
    if (den < detail::kDensityFloor) return 0.0;
    const double r = (u - v) / den;
    return r * r;
  };
  if (!pair.mu.sampler || !pair.nu.sampler)
    throw unsupported_error("skew_chi2 MC: samplers required");
  return mc_expectation(blend, fn, mc);
}

/// The (r, t) skew of a generator:
/// fhat(x) = (t x + (1-t)) f((r x + (1-r)) / (t x + (1-t))).
inline ConvexGenerator skewed_generator(const ConvexGenerator &g, double r,
                                        double t) {
  if (r < 0.0 || r > 1.0 || t < 0.0 || t > 1.0)
    throw input_error("skewed_generator: r, t must lie in [0,1]");
  ConvexGenerator out;
  out.label = g.label + " skew(r=" + std::to_string(r) +
              ",t=" + std::to_string(t) + ")";
  out.f = [f = g.f, r, t](double x) {
    const double den = t * x + (1.0 - t);
    return den * f((r * x + (1.0 - r)) / den);
  };
  return out;
}

/// D_f(mu || nu) = integral of f(u/v) v for a validated generator.
inline Estimate f_divergence(const ConvexGenerator &g, const DensityPair &pair,
                             const QuadratureSpec &spec = {}) {
  bool infinite = false;
  auto term = [&g](double u, double v, bool *inf_flag) {
    if (v < detail::kDensityFloor) {
      if (u > detail::kDensityFloor) *inf_flag = true;
      return 0.0;
    }
    return g.f(u / v) * v;
  };
  Estimate e = detail::integrate_pair(pair, term, spec, &infinite);
  return infinite ? detail::infinite_estimate() : e;
}

/// Jensen-Shannon divergence, in [0, ln 2].
inline Estimate jsd(const DensityPair &pair, const QuadratureSpec &spec = {},
                    const McSpec &mc = {}) {
  if (pair.dim() <= 2) {
    bool infinite = false;
    auto term = [](double u, double v, bool *) {
      const double m = 0.5 * (u + v);
      double s = 0.0;
      if (u > detail::kDensityFloor) s += 0.5 * u * std::log(u / m);
      if (v > detail::kDensityFloor) s += 0.5 * v * std::log(v / m);
      return s;
    };
    Estimate e = detail::integrate_pair(pair, term, spec, &infinite);
    e.value = std::clamp(e.value, 0.0, std::log(2.0));
    return e;
  }
  DensityPair swapped(pair.nu, pair.mu);
  Estimate a = skew_divergence(pair, 0.5, spec, mc);
  McSpec mc2 = mc;
  mc2.seed = mc.seed + 1;
  Estimate b = skew_divergence(swapped, 0.5, spec, mc2);
  return Estimate{0.5 * (a.value + b.value),
                  0.5 * std::hypot(a.error, b.error), a.method, mc.seed};
}

/// (alpha, w)-Jensen-Shannon divergence:
/// sum_i w_i D((1-a_i) p + a_i q || (1-abar) p + abar q).
inline Estimate generalized_jsd(const DensityPair &pair, const Vec &alpha,
                                const Vec &w, const QuadratureSpec &spec = {},
                                const McSpec &mc = {}) {
  if (alpha.size() != w.size() || alpha.empty())
    throw input_error("generalized_jsd: alpha/w size mismatch");
  double wsum = 0.0;
  for (double wi : w) {
    if (!(wi > 0.0))
      throw input_error("generalized_jsd: weights must be positive");
    wsum += wi;
  }
  if (std::fabs(wsum - 1.0) > 1e-12)
    throw input_error("generalized_jsd: weights must sum to 1");
  for (double a : alpha)
    if (a < 0.0 || a > 1.0)
      throw input_error("generalized_jsd: alpha outside [0,1]");
  double abar = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) abar += w[i] * alpha[i];

  auto blend_ref = [&pair](double a) {
    DensityRef r;
    r.dim = pair.dim();
    r.log_pdf = [p = pair.mu.log_pdf, q = pair.nu.log_pdf, a](const Vec &z) {
      if (a <= 0.0) return p(z);
      if (a >= 1.0) return q(z);
      const double lp = p(z) + std::log(1.0 - a);
      const double lq = q(z) + std::log(a);
      const double m = std::max(lp, lq);
      return m + std::log(std::exp(lp - m) + std::exp(lq - m));
    };
    r.box_lo.resize(pair.dim());
    r.box_hi.resize(pair.dim());
    Vec lo, hi;
    pair.union_box(lo, hi);
    r.box_lo = lo;
    r.box_hi = hi;
    return r;
  };

  const DensityRef mean_blend = blend_ref(abar);
  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    DensityPair term_pair(blend_ref(alpha[i]), mean_blend);
    Estimate e = kl(term_pair, spec, mc);
    total += w[i] * e.value;
    err += w[i] * e.error;
  }
  return Estimate{total, err, EstimateMethod::quadrature, 0};
}

} // namespace mixent

#endif
