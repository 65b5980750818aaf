#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "mixent/bounds.hpp"
#include "mixent/oracle.hpp"

using namespace mixent;

namespace {

MixtureModel two_gaussian(double a, double sigma = 1.0) {
  return MixtureModel(
      {0.5, 0.5}, {ComponentDensity(IsotropicGaussian(1, {-a}, sigma)),
                   ComponentDensity(IsotropicGaussian(1, {a}, sigma))});
}

MixtureModel grid4(double spacing) {
  std::vector<ComponentDensity> cs;
  for (int k = 0; k < 4; ++k)
    cs.emplace_back(IsotropicGaussian(1, {spacing * k}, 1.0));
  return MixtureModel({0.25, 0.25, 0.25, 0.25}, cs);
}

// uniform density on the radius-R ball
RadialProfile uniform_ball(int d, double r) {
  RadialProfile p;
  p.dim = d;
  p.name = "uniform_ball";
  const double vol = unit_ball_volume(d) * std::pow(r, d);
  p.sup = 1.0 / vol;
  p.log_psi = [r, vol](double rad) {
    return rad <= r ? -std::log(vol)
                    : -std::numeric_limits<double>::infinity();
  };
  p.entropy = std::log(vol);
  p.coord_variance = r * r / (d + 2.0);
  return p;
}

} // namespace

TEST_CASE("deficit upper bound by total variation") {
  MixtureModel same(
      {0.5, 0.5}, {ComponentDensity(IsotropicGaussian(1, {0.3}, 1.0)),
                   ComponentDensity(IsotropicGaussian(1, {0.3}, 1.0))});
  CHECK(deficit_upper_tv(same).value == Catch::Approx(0.0).margin(1e-9));

  const BoundReport r = deficit_upper_tv(two_gaussian(1.0));
  const double tf = 0.6826894921370859;
  CHECK(r.inputs_echo.at("T_f") == Catch::Approx(tf).margin(1e-8));
  CHECK(r.value == Catch::Approx(tf * std::log(2.0)).margin(1e-8));
  CHECK(r.binding());

  // always dominated by H(p)
  for (double a : {0.2, 1.0, 4.0, 9.0}) {
    const MixtureModel m = two_gaussian(a);
    CHECK(deficit_upper_tv(m).value <= m.weight_entropy() + 1e-12);
  }
  // T_f -> 1 as separation grows
  const BoundReport far = deficit_upper_tv(two_gaussian(8.0));
  CHECK(far.inputs_echo.at("T_f") > 1.0 - 1e-6);
}

TEST_CASE("k_phi vanishes for large lambda") {
  const RadialProfile base = RadialProfile::std_gaussian(1);
  CHECK(k_phi(base, 1, 12.0, 1.0, 1, 12.0) < 1e-6);
}

TEST_CASE("k_phi cross-checked by Monte Carlo") {
  const RadialProfile base = RadialProfile::std_gaussian(1);
  const double lambda = 1.0, tau = 1.0, eps = 1.0;
  const double k = k_phi(base, 1, lambda, tau, 1, eps);
  CHECK(k > 0.0);
  CHECK(std::isfinite(k));

  // MC estimate of the shell integral term
  McSpec mc;
  mc.seed = 11;
  mc.samples = 2000000;
  mc.chunks = 8;
  Sampler normal = [](CounterRng &rng) {
    return std::vector<double>{rng.next_normal()};
  };
  auto fn = [&](const std::vector<double> &x) {
    const double a = std::fabs(x[0]);
    if (a <= lambda) return 0.0;
    const double lg = std::log1p((eps * tau + tau * tau * a) / lambda);
    return lg * lg;
  };
  const Estimate shell = mc_expectation(normal, fn, mc);
  const double log_factor =
      std::log(1.0 * (base.sup + (3.0 / eps) / unit_ball_volume(1)));
  const double expected =
      log_factor * std::sqrt(gaussian_tail(1, lambda)) +
      std::sqrt(shell.value);
  const double dk = shell.error / (2.0 * std::sqrt(shell.value));
  CHECK(std::fabs(k - expected) <= 3.0 * dk + 1e-9);
}

TEST_CASE("gaussian profile sup") {
  for (int d : {1, 2, 3}) {
    const RadialProfile p = RadialProfile::std_gaussian(d, 0.8);
    CHECK(p.sup ==
          Catch::Approx(std::pow(2.0 * M_PI * 0.64, -0.5 * d)).margin(1e-12));
  }
}

TEST_CASE("c_tilde composition and limits") {
  TailModel tail;
  tail.d = 1;
  tail.sigma = 1.0;
  const double h = 0.5 * std::log(2.0 * M_PI * M_E);
  const double k = k_phi(RadialProfile::std_gaussian(1), 1, 3.0, 1.0, 1, 3.0);
  const BoundReport r = c_tilde(tail, h, k, 3.0, 1.0, 1, 1);
  const double t3 = gaussian_tail(1, 3.0);
  CHECK(r.value ==
        Catch::Approx(t3 * (1.0 + h) + std::sqrt(t3) * (1.0 + k))
            .margin(1e-12));

  // degenerate tail limit: C~ -> M - 1
  const BoundReport deg = c_tilde(tail, h, 0.0, 100.0, 1.0, 3, 1);
  CHECK(deg.value == Catch::Approx(2.0).margin(1e-8));

  // monotone non-increasing in lambda
  double prev = std::numeric_limits<double>::infinity();
  for (double lam : {1.0, 2.0, 3.0, 4.0, 6.0}) {
    const double kk =
        k_phi(RadialProfile::std_gaussian(1), 1, lam, 1.0, 1, lam);
    const double v = c_tilde(tail, h, kk, lam, 1.0, 1, 1).value;
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("deficit lower bound on a separated grid") {
  const MixtureModel m = grid4(12.0); // lambda/sigma = 6
  const SeparationCertificate cert(6.0, 1, 1.0);
  REQUIRE(verify_separation(m, cert));
  const BoundReport lower = deficit_lower(m, cert);
  CHECK(lower.binding());
  CHECK(std::fabs(lower.value - std::log(4.0)) < 1e-3);

  const OracleResult oracle = concavity_deficit(m);
  const BoundReport upper = deficit_upper_tv(m);
  CHECK(lower.value <= oracle.value + oracle.error + 1e-9);
  CHECK(oracle.value - oracle.error <= upper.value + 1e-9);
}

TEST_CASE("deficit lower bound gates on the certificate") {
  const MixtureModel overlap = two_gaussian(0.5);
  const BoundReport r = deficit_lower(overlap, SeparationCertificate(2.0, 1, 1.0));
  CHECK_FALSE(r.binding());
  CHECK(r.value == 0.0);
  CHECK(r.clamped);

  MixtureModel single(
      {1.0}, {ComponentDensity(IsotropicGaussian(1, {0.0}, 1.0))});
  const BoundReport s = deficit_lower(single, SeparationCertificate(2.0, 1, 1.0));
  CHECK(s.value == 0.0);
  CHECK(s.clamped);
}

TEST_CASE("well spaced sum bound") {
  const RadialProfile base = RadialProfile::std_gaussian(1);
  for (double lambda : {0.5, 1.0, 2.0}) {
    // direct sum over the grid {2 lambda k}
    double direct = 0.0;
    for (int k = -40; k <= 40; ++k)
      direct += std::exp(base.log_psi(std::fabs(2.0 * lambda * k)));
    CHECK(direct <= well_spaced_sum_bound(base, lambda, 1, 1) + 1e-12);
    CHECK(well_spaced_sum_bound(base, lambda, 2, 1) ==
          Catch::Approx(2.0 * well_spaced_sum_bound(base, lambda, 1, 1))
              .margin(1e-12));
  }

  // uniform-on-ball reduces to the sphere packing count
  for (int d : {1, 2}) {
    const double r = 2.0, lambda = 0.7;
    const RadialProfile u = uniform_ball(d, r);
    const double bound = well_spaced_sum_bound(u, lambda, 1, d);
    const double packing = 1.0 + std::pow(3.0 * r / lambda, d);
    CHECK(bound * unit_ball_volume(d) * std::pow(r, d) ==
          Catch::Approx(packing).margin(1e-10));
  }
}

TEST_CASE("counting bound") {
  CHECK(counting_bound(1.0, 1.0, 1.0, 1, 0.0, 3) ==
        Catch::Approx(8.0).margin(1e-12));
  CHECK(counting_bound(2.0, 1.0, 1.0, 2, 0.0, 1) ==
        Catch::Approx(3.0).margin(1e-12));
  // monotone in |w|
  double prev = 0.0;
  for (double w : {0.0, 0.5, 1.0, 2.0}) {
    const double v = counting_bound(1.0, 0.5, 1.5, 1, w, 2);
    CHECK(v >= prev);
    prev = v;
  }
  // explicit enumeration on the 2 lambda grid, tau = 1
  const double lambda = 1.0, eps = 1.0;
  for (double w : {0.0, 0.7, 1.9}) {
    int worst = 0;
    for (int i = -10; i <= 10; ++i) {
      int count = 0;
      for (int l = -10; l <= 10; ++l) {
        // T_ij(w) - T_lj(w) = (x_j - x_i) - (x_j - x_l) = x_l - x_i
        if (std::fabs(2.0 * lambda * (l - i)) < eps) ++count;
      }
      worst = std::max(worst, count);
    }
    CHECK(worst <= counting_bound(lambda, eps, 1.0, 1, w, 1));
  }
}

TEST_CASE("log concave tail envelope") {
  TailModel m;
  m.d = 1;
  m.sigma = 1.0;
  CHECK(log_concave_tail(m, 0.0) == 1.0);
  const double c = std::log(2.0) / (2.0 * std::sqrt(2.0));
  for (double t : {2.0, 4.0, 6.0}) {
    const double env = std::exp(-0.5 * std::log(2.0) - c * t);
    CHECK(gaussian_tail(1, t) <= env);
    CHECK(log_concave_tail(m, t) == Catch::Approx(env).margin(1e-14));
  }
}

TEST_CASE("strongly log-concave tail domination") {
  TailModel strong;
  strong.kind = TailKind::strongly_log_concave;
  strong.d = 1;
  strong.sigma = 1.0;
  CHECK(strong_lc_tail_dominates(strong, 1.5));
  strong.sigma = 0.8;
  CHECK(strong_lc_tail_dominates(strong, 1.5));
  strong.sigma = 2.0;
  CHECK_FALSE(strong_lc_tail_dominates(strong, 1.5));
  TailModel wrong;
  wrong.kind = TailKind::gaussian;
  CHECK_THROWS_AS(strong_lc_tail_dominates(wrong, 1.0), input_error);
}

TEST_CASE("varentropy closed forms") {
  ComponentDensity g1(IsotropicGaussian(1, {0.4}, 2.0));
  CHECK(varentropy(g1).value == Catch::Approx(0.5).margin(1e-6));
  ComponentDensity g2(IsotropicGaussian(2, {0.0, 0.0}, 1.0));
  QuadratureSpec spec;
  spec.abs_tol = 1e-8;
  spec.rel_tol = 1e-8;
  const double v2 = varentropy(g2, spec).value;
  CHECK(v2 == Catch::Approx(1.0).margin(1e-5));
  CHECK(v2 <= 2.0 + 1e-6);

  // uniform: constant surprisal
  ComponentDensity uni(
      Pushforward(uniform_ball(1, 1.5),
                  AffineMap::translation({0.0})));
  CHECK(varentropy(uni).value == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("appendix tail bounds dominate quadrature oracles") {
  const double inf = std::numeric_limits<double>::infinity();
  for (int d : {1, 2}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
        const double surf = d * unit_ball_volume(d);
        const double log_norm =
            -0.5 * d * std::log(2.0 * M_PI * sigma * sigma);
        auto entropy_tail_fn = [&](double r) {
          const double lp = log_norm - 0.5 * r * r / (sigma * sigma);
          return -surf * std::pow(r, d - 1) * std::exp(lp) * lp;
        };
        const double oracle =
            integrate_1d(entropy_tail_fn, lambda, inf).value;
        const double bound = d == 1
                                 ? gaussian_entropy_tail_1d(sigma, lambda)
                                 : gaussian_entropy_tail(d, sigma, lambda);
        CHECK(oracle <= bound + 1e-10);

        if (d >= 2) {
          auto norm_tail_fn = [&](double r) {
            const double lp = log_norm - 0.5 * r * r / (sigma * sigma);
            return surf * std::pow(r, d) * std::exp(lp);
          };
          const double norm_oracle =
              integrate_1d(norm_tail_fn, lambda, inf).value;
          CHECK(norm_oracle <= gaussian_norm_tail(d, sigma, lambda) + 1e-10);
        }
      }
    }
  }
}

TEST_CASE("gaussian norm tail at lambda = 0 bounds the mean norm") {
  const double inf = std::numeric_limits<double>::infinity();
  for (int d : {2, 3}) {
    const double surf = d * unit_ball_volume(d);
    auto fn = [&](double r) {
      return surf * std::pow(r, d) *
             std::exp(-0.5 * r * r - 0.5 * d * std::log(2.0 * M_PI));
    };
    const double mean_norm = integrate_1d(fn, 0.0, inf).value;
    CHECK(mean_norm <= gaussian_norm_tail(d, 1.0, 0.0) + 1e-10);
  }
  // homogeneity
  CHECK(gaussian_norm_tail(2, 2.0, 3.0) ==
        Catch::Approx(2.0 * gaussian_norm_tail(2, 1.0, 1.5)).margin(1e-12));
}

TEST_CASE("entropy tail bounds vanish at large lambda") {
  CHECK(gaussian_entropy_tail(2, 1.0, 20.0) < 1e-12);
  CHECK(gaussian_entropy_tail_1d(1.0, 20.0) < 1e-12);
}
