#ifndef MIXENT_ORACLE_HPP
#define MIXENT_ORACLE_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "mixent/density.hpp"
#include "mixent/divergence.hpp"
#include "mixent/mc.hpp"
#include "mixent/quadrature.hpp"

// Ground-truth estimators: mixture entropy, concavity deficit, conditional
// entropy and mutual information.  Quadrature for d <= 2, hierarchical MC
// above.

namespace mixent {

using OracleResult = Estimate;

class consistency_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Estimate entropy_quadrature(const MixtureModel &model,
                                   const QuadratureSpec &spec) {
  Vec lo, hi;
  model.bounding_box(lo, hi);
  if (model.dim() == 1) {
    auto fn = [&model](double x) {
      const double lp = model.log_pdf(Vec{x});
      const double p = std::exp(lp);
      return p < 1e-300 ? 0.0 : -p * lp;
    };
    return integrate_1d(fn, lo[0], hi[0], spec);
  }
  auto fn = [&model](double x, double y) {
    const double lp = model.log_pdf(Vec{x, y});
    const double p = std::exp(lp);
    return p < 1e-300 ? 0.0 : -p * lp;
  };
  return integrate_2d(fn, lo[0], hi[0], lo[1], hi[1], spec);
}

} // namespace detail

/// h(f) = -E_f ln f.
inline OracleResult mixture_entropy(const MixtureModel &model,
                                    const QuadratureSpec &spec = {},
                                    const McSpec &mc = {}) {
  if (model.dim() <= 2) return detail::entropy_quadrature(model, spec);
  Sampler sampler = [&model](CounterRng &rng) { return model.sample(rng); };
  auto fn = [&model](const Vec &z) { return -model.log_pdf(z); };
  return mc_expectation(sampler, fn, mc);
}

/// Concavity deficit h(f) - sum p_i h(f_i), computed as sum p_i D(f_i || f)
/// with the entropy-difference path as a consistency check.
inline OracleResult concavity_deficit(const MixtureModel &model,
                                      const QuadratureSpec &spec = {},
                                      const McSpec &mc = {}) {
  const DensityRef mix = DensityRef::from(model);
  double primary = 0.0, primary_err = 0.0;
  for (int i = 0; i < model.size(); ++i) {
    DensityPair pair(DensityRef::from(model.component(i)), mix);
    McSpec mci = mc;
    mci.seed = mc.seed + static_cast<std::uint64_t>(i) + 1;
    const Estimate di = kl(pair, spec, mci);
    primary += model.weights()[i] * di.value;
    primary_err += model.weights()[i] * di.error;
  }

  const Estimate hf = mixture_entropy(model, spec, mc);
  double hsum = 0.0;
  for (int i = 0; i < model.size(); ++i)
    hsum += model.weights()[i] * model.component(i).entropy();
  const double alt = hf.value - hsum;
  const double tol = 1e-6 + 8.0 * (primary_err + hf.error);
  if (std::fabs(primary - alt) > tol)
    throw consistency_error(
        "concavity_deficit: KL path " + std::to_string(primary) +
        " disagrees with entropy path " + std::to_string(alt));

  Estimate out;
  out.value = primary;
  out.error = primary_err;
  out.method = hf.method;
  out.seed = mc.seed;
  return out;
}

/// H(X|Z) = H(p) - deficit.
inline OracleResult conditional_entropy_x_given_z(const MixtureModel &model,
                                                  const QuadratureSpec &spec = {},
                                                  const McSpec &mc = {}) {
  const OracleResult d = concavity_deficit(model, spec, mc);
  OracleResult out = d;
  out.value = model.weight_entropy() - d.value;
  return out;
}

/// I(X; Z) equals the concavity deficit.
inline OracleResult mutual_information(const MixtureModel &model,
                                       const QuadratureSpec &spec = {},
                                       const McSpec &mc = {}) {
  return concavity_deficit(model, spec, mc);
}

} // namespace mixent

#endif
