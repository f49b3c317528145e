#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gica/quadrature.hpp"
#include "gica/source_model.hpp"

using gica::SourceKind;
using gica::SourceModel;
using gica::Vector;

TEST_CASE("super-Gaussian normalizer matches the closed form c/pi") {
  const SourceModel m(SourceKind::SuperGaussian, 1.5);
  // integral of sech(cs) over the line is pi/c
  CHECK(m.normalizer() == doctest::Approx(1.5 / M_PI).epsilon(1e-10));
  CHECK(m.density(0.0) == doctest::Approx(1.5 / M_PI).epsilon(1e-10));
}

TEST_CASE("sub-Gaussian normalizer matches an independent quadrature") {
  const SourceModel m(SourceKind::SubGaussian, 0.1);
  // Independent oracle: fixed-grid Simpson on [-8, 8].
  const int steps = 40000;
  const double h = 16.0 / steps;
  double acc = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double s = -8.0 + i * h;
    const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::exp(-0.1 * s * s * s * s);
  }
  acc *= h / 3.0;
  CHECK(acc == doctest::Approx(3.2247).epsilon(1e-3));
  CHECK(m.normalizer() == doctest::Approx(1.0 / acc).epsilon(1e-9));
}

TEST_CASE("densities are even, scores odd, score derivatives even") {
  for (const SourceModel m : {SourceModel(SourceKind::SubGaussian, 0.1),
                              SourceModel(SourceKind::SuperGaussian, 1.5)}) {
    for (double s = 0.25; s <= 5.0; s += 0.25) {
      CHECK(m.density(s) == doctest::Approx(m.density(-s)));
      CHECK(m.score(s) == doctest::Approx(-m.score(-s)));
      CHECK(m.score_deriv(s) == doctest::Approx(m.score_deriv(-s)));
      CHECK(m.density(s) > 0.0);
    }
  }
}

TEST_CASE("score closed forms") {
  const SourceModel sub(SourceKind::SubGaussian, 0.1);
  CHECK(sub.score(1.0) == doctest::Approx(-0.4));
  CHECK(sub.score_deriv(0.0) == 0.0);

  const SourceModel sup(SourceKind::SuperGaussian, 1.5);
  CHECK(sup.score(0.0) == 0.0);
  CHECK(sup.score_deriv(0.0) == doctest::Approx(-2.25));
}

TEST_CASE("score and score_deriv match finite differences of ln density") {
  const double h = 1e-5;
  for (const SourceModel m : {SourceModel(SourceKind::SubGaussian, 0.1),
                              SourceModel(SourceKind::SuperGaussian, 1.5)}) {
    for (double s = -5.0; s <= 5.0; s += 0.5) {
      const double fd_score =
          (m.log_density(s + h) - m.log_density(s - h)) / (2.0 * h);
      CHECK(m.score(s) == doctest::Approx(fd_score).epsilon(1e-6));
      const double fd_deriv = (m.score(s + h) - m.score(s - h)) / (2.0 * h);
      CHECK(m.score_deriv(s) == doctest::Approx(fd_deriv).epsilon(1e-6));
    }
  }
}

TEST_CASE("gamma_norm closed form for sech^2") {
  const SourceModel m(SourceKind::SuperGaussian, 1.5);
  // c1^2 * integral sech^2(1.5 s) ds = (1.5/pi)^2 * 2/1.5
  const double expected = std::pow(1.5 / M_PI, 2) * 2.0 / 1.5;
  CHECK(m.gamma_norm(1.0) == doctest::Approx(expected).epsilon(1e-8));
  CHECK(expected == doctest::Approx(0.30396).epsilon(1e-4));
}

TEST_CASE("gamma_norm tends to one as gamma vanishes") {
  for (const SourceModel m : {SourceModel(SourceKind::SubGaussian, 0.1),
                              SourceModel(SourceKind::SuperGaussian, 1.5)}) {
    CHECK(m.gamma_norm(1e-8) == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("gamma_norm positive for the sub-Gaussian shape") {
  const SourceModel m(SourceKind::SubGaussian, 0.1);
  const double v = m.gamma_norm(0.5);
  CHECK(v > 0.0);
  CHECK(std::isfinite(v));
}

TEST_CASE("product density power") {
  const gica::ProductModel pm =
      gica::make_product_model(SourceKind::SuperGaussian, 1.5, 2);
  Vector y(2);
  y << 0.7, -1.3;
  CHECK(pm.density_pow(y, 0.0) == 1.0);

  Vector y_swapped(2);
  y_swapped << -1.3, 0.7;
  // identical components, even density: order and sign free
  CHECK(pm.density_pow(y, 0.8) ==
        doctest::Approx(pm.density_pow(y_swapped, 0.8)));

  Vector zero = Vector::Zero(2);
  CHECK(pm.density_pow(zero, 1.0) ==
        doctest::Approx(std::pow(1.5 / M_PI, 2)).epsilon(1e-10));
}

TEST_CASE("weighted odd moment vanishes for symmetric sources") {
  // Condition-style Monte Carlo check: |mean f^g(S) S| < 3 SE for symmetric S.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const SourceModel m(SourceKind::SubGaussian, 0.1);
  const int n = 100000;
  const double gamma = 0.4;
  double mean = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = u(rng);
    const double v = std::exp(gamma * m.log_density(s)) * s;
    mean += v;
    sq += v * v;
  }
  mean /= n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean) < 3.0 * se);
}
