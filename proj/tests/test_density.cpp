#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "mixent/density.hpp"

using namespace mixent;

namespace {

MixtureModel two_gaussian(double a, double sigma = 1.0) {
  return MixtureModel(
      {0.5, 0.5}, {ComponentDensity(IsotropicGaussian(1, {-a}, sigma)),
                   ComponentDensity(IsotropicGaussian(1, {a}, sigma))});
}

double entropy_by_quadrature_1d(const ComponentDensity &c) {
  const Vec ctr = c.center();
  const double e = c.extent();
  auto fn = [&c](double x) {
    const double lp = c.log_pdf(Vec{x});
    const double p = std::exp(lp);
    return p < 1e-300 ? 0.0 : -p * lp;
  };
  return integrate_1d(fn, ctr[0] - e, ctr[0] + e).value;
}

} // namespace

TEST_CASE("log_pdf closed forms") {
  MixtureModel single(
      {1.0}, {ComponentDensity(IsotropicGaussian(1, {0.0}, 1.0))});
  CHECK(single.log_pdf({0.0}) ==
        Catch::Approx(-0.5 * std::log(2.0 * M_PI)).margin(1e-14));

  for (double a : {0.5, 2.0, 5.0}) {
    const MixtureModel m = two_gaussian(a);
    CHECK(m.pdf({0.0}) ==
          Catch::Approx(std::exp(-0.5 * a * a) / std::sqrt(2.0 * M_PI))
              .margin(1e-14));
  }
  CHECK_THROWS_AS(single.log_pdf({0.0, 0.0}), input_error);
}

TEST_CASE("log_pdf agrees with the direct density sum") {
  const MixtureModel m = two_gaussian(1.5);
  for (double x = -6.0; x <= 6.0; x += 0.5) {
    const double direct =
        0.5 * std::exp(-0.5 * (x + 1.5) * (x + 1.5)) / std::sqrt(2.0 * M_PI) +
        0.5 * std::exp(-0.5 * (x - 1.5) * (x - 1.5)) / std::sqrt(2.0 * M_PI);
    CHECK(std::fabs(m.log_pdf({x}) - std::log(direct)) <
          1e-12 * std::fabs(std::log(direct)) + 1e-13);
  }
}

TEST_CASE("construction rejects bad weights") {
  std::vector<ComponentDensity> cs = {
      ComponentDensity(IsotropicGaussian(1, {0.0}, 1.0)),
      ComponentDensity(IsotropicGaussian(1, {1.0}, 1.0))};
  CHECK_THROWS_AS(MixtureModel({1.0, 0.0}, cs), input_error);
  CHECK_THROWS_AS(MixtureModel({0.6, 0.6}, cs), input_error);
  CHECK_THROWS_AS(MixtureModel({}, {}), input_error);
}

TEST_CASE("component entropy closed forms") {
  ComponentDensity std1(IsotropicGaussian(1, {0.0}, 1.0));
  const double half_ln_2pie = 0.5 * std::log(2.0 * M_PI * M_E);
  CHECK(std1.entropy() == Catch::Approx(half_ln_2pie).margin(1e-14));
  CHECK(std::fabs(std1.entropy() - entropy_by_quadrature_1d(std1)) < 1e-8);

  ComponentDensity shifted(IsotropicGaussian(1, {7.0}, 1.0));
  CHECK(shifted.entropy() == std1.entropy());

  // pushforward by A = 2I of N(0,1): entropy shifts by ln 2
  AffineMap dbl(Matrix::identity(1, 2.0), {0.0});
  ComponentDensity stretched(
      Pushforward(RadialProfile::std_gaussian(1), dbl));
  CHECK(stretched.entropy() ==
        Catch::Approx(half_ln_2pie + std::log(2.0)).margin(1e-12));
  CHECK(std::fabs(stretched.entropy() - entropy_by_quadrature_1d(stretched)) <
        1e-8);
}

TEST_CASE("mixture density integrates to one") {
  const MixtureModel m = two_gaussian(2.0);
  Vec lo, hi;
  m.bounding_box(lo, hi);
  const double z =
      integrate_1d([&m](double x) { return m.pdf({x}); }, lo[0], hi[0]).value;
  CHECK(z == Catch::Approx(1.0).margin(1e-8));

  MixtureModel m2(
      {0.3, 0.7}, {ComponentDensity(IsotropicGaussian(2, {0.0, 0.0}, 1.0)),
                   ComponentDensity(IsotropicGaussian(2, {2.0, 1.0}, 0.5))});
  Vec lo2, hi2;
  m2.bounding_box(lo2, hi2);
  QuadratureSpec spec;
  spec.abs_tol = 1e-9;
  spec.rel_tol = 1e-9;
  const double z2 = integrate_2d(
      [&m2](double x, double y) { return m2.pdf({x, y}); }, lo2[0], hi2[0],
      lo2[1], hi2[1], spec).value;
  CHECK(z2 == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("mixture complement") {
  const MixtureModel m = two_gaussian(1.0);
  const MixtureModel c0 = m.mixture_complement(0);
  CHECK(c0.size() == 1);
  CHECK(c0.component(0).center()[0] == 1.0);

  MixtureModel three(
      {1.0 / 3, 1.0 / 3, 1.0 / 3},
      {ComponentDensity(IsotropicGaussian(1, {0.0}, 1.0)),
       ComponentDensity(IsotropicGaussian(1, {1.0}, 1.0)),
       ComponentDensity(IsotropicGaussian(1, {2.0}, 1.0))});
  const MixtureModel c = three.mixture_complement(0);
  CHECK(c.weights()[0] == Catch::Approx(0.5).margin(1e-15));
  CHECK(c.weights()[1] == Catch::Approx(0.5).margin(1e-15));

  MixtureModel single(
      {1.0}, {ComponentDensity(IsotropicGaussian(1, {0.0}, 1.0))});
  CHECK_THROWS_AS(single.mixture_complement(0), input_error);

  // re-mixing reproduces f pointwise
  for (double x = -4.0; x <= 4.0; x += 0.7) {
    const double f = three.pdf({x});
    const double rebuilt = three.weights()[0] * three.component(0).pdf({x}) +
                           (1.0 - three.weights()[0]) * c.pdf({x});
    CHECK(std::fabs(f - rebuilt) < 1e-12);
  }
}

TEST_CASE("affine map tau and determinant") {
  Matrix a = Matrix::identity(2);
  a.at(0, 0) = 3.0;
  a.at(1, 1) = 0.5;
  AffineMap map(a, {1.0, -1.0});
  CHECK(map.s_max == Catch::Approx(3.0).margin(1e-12));
  CHECK(map.s_min == Catch::Approx(0.5).margin(1e-12));
  CHECK(map.tau() == Catch::Approx(9.0).margin(1e-12));
  CHECK(map.log_abs_det == Catch::Approx(std::log(1.5)).margin(1e-12));
  const Vec y = map.apply({1.0, 2.0});
  CHECK(y[0] == Catch::Approx(4.0));
  CHECK(y[1] == Catch::Approx(0.0));
  const Vec back = map.apply_inverse(y);
  CHECK(back[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(back[1] == Catch::Approx(2.0).margin(1e-12));

  Matrix sing = Matrix::identity(2, 0.0);
  CHECK_THROWS_AS(AffineMap(sing, {0.0, 0.0}), input_error);
}

TEST_CASE("radial profile normalization and tails") {
  for (int d : {1, 2, 3}) {
    const RadialProfile p = RadialProfile::std_gaussian(d);
    CHECK(p.normalization() == Catch::Approx(1.0).margin(1e-8));
    for (double t : {0.5, 1.0, 2.0})
      CHECK(p.tail(t) == Catch::Approx(gaussian_tail(d, t)).margin(1e-12));
  }
}

TEST_CASE("verify_separation on translation families") {
  const double lambda = 2.0;
  MixtureModel spaced(
      {0.5, 0.5}, {ComponentDensity(IsotropicGaussian(1, {0.0}, 1.0)),
                   ComponentDensity(IsotropicGaussian(1, {2.0 * lambda}, 1.0))});
  CHECK(verify_separation(spaced, SeparationCertificate(lambda, 1, 1.0)));

  MixtureModel coincident(
      {0.5, 0.5}, {ComponentDensity(IsotropicGaussian(1, {0.0}, 1.0)),
                   ComponentDensity(IsotropicGaussian(1, {0.0}, 1.0))});
  CHECK_FALSE(
      verify_separation(coincident, SeparationCertificate(lambda, 1, 1.0)));
  CHECK(verify_separation(coincident, SeparationCertificate(lambda, 2, 1.0)));

  // grid {2 lambda k}
  std::vector<ComponentDensity> grid;
  Vec w;
  for (int k = 1; k <= 5; ++k) {
    grid.emplace_back(IsotropicGaussian(1, {2.0 * lambda * k}, 1.0));
    w.push_back(0.2);
  }
  MixtureModel grid_model(w, grid);
  CHECK(verify_separation(grid_model, SeparationCertificate(lambda, 1, 1.0)));
  CHECK_FALSE(
      verify_separation(grid_model, SeparationCertificate(2.0 * lambda, 1, 1.0)));

  // mixed bases are not comparable
  MixtureModel mixed(
      {0.5, 0.5}, {ComponentDensity(IsotropicGaussian(1, {0.0}, 1.0)),
                   ComponentDensity(IsotropicGaussian(1, {10.0}, 2.0))});
  CHECK_THROWS_AS(
      verify_separation(mixed, SeparationCertificate(lambda, 1, 1.0)),
      unsupported_error);
}

TEST_CASE("certificate validation") {
  CHECK_THROWS_AS(SeparationCertificate(0.0, 1, 1.0), input_error);
  CHECK_THROWS_AS(SeparationCertificate(1.0, 0, 1.0), input_error);
  CHECK_THROWS_AS(SeparationCertificate(1.0, 1, 0.5), input_error);
}

TEST_CASE("hierarchical sampling hits both modes") {
  const MixtureModel m = two_gaussian(10.0);
  CounterRng rng(99);
  int left = 0, right = 0;
  for (int i = 0; i < 2000; ++i) {
    const Vec z = m.sample(rng);
    (z[0] < 0.0 ? left : right)++;
  }
  CHECK(left > 800);
  CHECK(right > 800);
}
