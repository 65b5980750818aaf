#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "mixent/mc.hpp"

using namespace mixent;

namespace {

Sampler std_normal_1d() {
  return [](CounterRng &rng) { return std::vector<double>{rng.next_normal()}; };
}

bool bit_identical(const Estimate &a, const Estimate &b) {
  return std::memcmp(&a.value, &b.value, sizeof(double)) == 0 &&
         std::memcmp(&a.error, &b.error, sizeof(double)) == 0;
}

} // namespace

TEST_CASE("constant integrand") {
  McSpec spec;
  spec.samples = 1000;
  const Estimate e = mc_expectation(
      std_normal_1d(), [](const std::vector<double> &) { return 1.0; }, spec);
  CHECK(e.value == 1.0);
  CHECK(e.error == 0.0);
  CHECK(e.method == EstimateMethod::monte_carlo);
}

TEST_CASE("mean absolute value of a standard normal") {
  McSpec spec;
  spec.seed = 42;
  spec.samples = 200000;
  spec.chunks = 8;
  const Estimate e = mc_expectation(
      std_normal_1d(),
      [](const std::vector<double> &x) { return std::fabs(x[0]); }, spec);
  const double exact = std::sqrt(2.0 / M_PI);
  CHECK(std::fabs(e.value - exact) < 4.0 * e.error);
}

TEST_CASE("bit-identical across thread counts") {
  McSpec spec;
  spec.seed = 7;
  spec.samples = 50000;
  spec.chunks = 8;
  auto fn = [](const std::vector<double> &x) { return x[0] * x[0]; };
  const Estimate e1 = mc_expectation(std_normal_1d(), fn, spec, 1);
  const Estimate e2 = mc_expectation(std_normal_1d(), fn, spec, 2);
  const Estimate e8 = mc_expectation(std_normal_1d(), fn, spec, 8);
  CHECK(bit_identical(e1, e2));
  CHECK(bit_identical(e1, e8));
}

TEST_CASE("different seeds decorrelate") {
  McSpec a, b;
  a.seed = 1;
  b.seed = 2;
  a.samples = b.samples = 1000;
  auto fn = [](const std::vector<double> &x) { return x[0]; };
  const Estimate ea = mc_expectation(std_normal_1d(), fn, a);
  const Estimate eb = mc_expectation(std_normal_1d(), fn, b);
  CHECK(ea.value != eb.value);
}

TEST_CASE("poisoned sample reports its index") {
  McSpec spec;
  spec.samples = 100;
  bool threw = false;
  try {
    mc_expectation(
        std_normal_1d(),
        [](const std::vector<double> &) {
          return std::numeric_limits<double>::quiet_NaN();
        },
        spec);
  } catch (const poisoned_sample_error &e) {
    threw = true;
    CHECK(e.sample_index == 0);
  }
  CHECK(threw);
}

TEST_CASE("spec validation") {
  McSpec bad;
  bad.samples = 0;
  CHECK_THROWS_AS(mc_expectation(std_normal_1d(),
                                 [](const std::vector<double> &) { return 0.0; },
                                 bad),
                  input_error);
}

TEST_CASE("uniform doubles stay inside the unit interval") {
  CounterRng rng(123);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
