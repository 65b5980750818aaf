#ifndef MIXENT_MC_HPP
#define MIXENT_MC_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixent/quadrature.hpp"
#include "mixent/special_functions.hpp"

// Seeded Monte Carlo with counter-based per-chunk substreams.  A fixed
// (seed, samples, chunks) triple yields a bit-identical Estimate no matter
// how many threads execute the chunks.

namespace mixent {

struct McSpec {
  std::uint64_t seed = 0;
  std::int64_t samples = 100000;
  int chunks = 1;

  void validate() const {
    if (samples < 1) throw input_error("McSpec: samples must be >= 1");
    if (chunks < 1) throw input_error("McSpec: chunks must be >= 1");
  }
};

class poisoned_sample_error : public std::runtime_error {
public:
  poisoned_sample_error(std::int64_t index)
      : std::runtime_error("mc_expectation: integrand returned NaN at sample " +
                           std::to_string(index)),
        sample_index(index) {}
  std::int64_t sample_index;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic stream generator; each MC chunk owns one, derived from
/// seed XOR a mixed chunk index.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : state_(seed) {
    // warm up so nearby seeds decorrelate
    detail::splitmix64(state_);
    detail::splitmix64(state_);
  }

  static CounterRng for_chunk(std::uint64_t seed, std::uint64_t chunk) {
    std::uint64_t c = chunk + 0x632be59bd9b4e019ULL;
    c = detail::splitmix64(c);
    return CounterRng(seed ^ c);
  }

  std::uint64_t next_u64() { return detail::splitmix64(state_); }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (no spare caching, for reproducibility).
  double next_normal() {
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::vector<double> next_normal_vec(int d) {
    std::vector<double> v(d);
    for (int i = 0; i < d; ++i) v[i] = next_normal();
    return v;
  }

private:
  std::uint64_t state_;
};

using Sampler = std::function<std::vector<double>(CounterRng &)>;

/// Sample mean of fn over draws from sampler.  Chunks are evaluated
/// independently (possibly across n_threads) and combined in index order,
/// so the result depends only on (seed, samples, chunks).
inline Estimate mc_expectation(
    const Sampler &sampler,
    const std::function<double(const std::vector<double> &)> &fn,
    const McSpec &spec, int n_threads = 1) {
  spec.validate();
  struct ChunkAcc {
    double sum = 0.0, sumsq = 0.0;
    std::int64_t poisoned = -1;
  };
  const std::int64_t per_chunk = spec.samples / spec.chunks;
  auto run_chunk = [&](int c) {
    ChunkAcc acc;
    std::int64_t n = per_chunk + (c == spec.chunks - 1
                                      ? spec.samples % spec.chunks
                                      : 0);
    CounterRng rng = CounterRng::for_chunk(spec.seed, c);
    for (std::int64_t i = 0; i < n; ++i) {
      const std::vector<double> x = sampler(rng);
      const double v = fn(x);
      if (std::isnan(v)) {
        acc.poisoned = c * per_chunk + i;
        return acc;
      }
      acc.sum += v;
      acc.sumsq += v * v;
    }
    return acc;
  };

  std::vector<ChunkAcc> accs(spec.chunks);
  if (n_threads <= 1 || spec.chunks == 1) {
    for (int c = 0; c < spec.chunks; ++c) accs[c] = run_chunk(c);
  } else {
    std::vector<std::future<ChunkAcc>> futures;
    futures.reserve(spec.chunks);
    for (int c = 0; c < spec.chunks; ++c)
      futures.push_back(std::async(std::launch::async, run_chunk, c));
    for (int c = 0; c < spec.chunks; ++c) accs[c] = futures[c].get();
  }

  double sum = 0.0, sumsq = 0.0;
  for (int c = 0; c < spec.chunks; ++c) {
    if (accs[c].poisoned >= 0) throw poisoned_sample_error(accs[c].poisoned);
    sum += accs[c].sum;
    sumsq += accs[c].sumsq;
  }
  const double n = static_cast<double>(spec.samples);
  const double mean = sum / n;
  double stderr_ = 0.0;
  if (spec.samples > 1) {
    double var = (sumsq - n * mean * mean) / (n - 1.0);
    if (var < 0.0) var = 0.0;
    stderr_ = std::sqrt(var / n);
  }
  return Estimate{mean, stderr_, EstimateMethod::monte_carlo, spec.seed};
}

} // namespace mixent

#endif
