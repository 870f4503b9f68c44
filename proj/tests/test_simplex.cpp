#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "metainf/errors.hpp"
#include "metainf/simplex.hpp"
#include "oracles.hpp"

using namespace metainf;

namespace {

std::vector<double> random_interior(std::size_t d, std::mt19937_64& gen, double floor = 0.0) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(d);
  double s = 0.0;
  for (double& v : x) s += v = e(gen) + 1e-3;
  for (double& v : x) v = floor + (1.0 - floor * static_cast<double>(d)) * v / s;
  return x;
}

const double kFourRootTwo = 4.0 * (std::sqrt(2.0) - 1.0);

}  // namespace

TEST_SUITE("simplex") {

TEST_CASE("distribution construction validates") {
  CHECK_THROWS_AS(Distribution({0.5, 0.6}), DomainError);
  CHECK_THROWS_AS(Distribution({1.5, -0.5}), DomainError);
  CHECK_NOTHROW(Distribution({0.5, 0.5 + 1e-10}));
  CHECK(Distribution::uniform(4)[2] == doctest::Approx(0.25));
  CHECK(Distribution::one_hot(3, 1)[1] == 1.0);
}

TEST_CASE("truncation level bounds") {
  CHECK_NOTHROW(TruncationLevel(0.25, 4));
  CHECK_NOTHROW(TruncationLevel(0.0, 4));
  CHECK_THROWS_AS(TruncationLevel(0.3, 4), DomainError);
  CHECK_THROWS_AS(TruncationLevel(-0.1, 4), DomainError);
}

TEST_CASE("tsallis entropy values") {
  for (std::size_t d : {2, 5, 17}) CHECK(tsallis_entropy(0.5, Distribution::one_hot(d, d - 1)) == 0.0);
  CHECK(tsallis_entropy(0.5, Distribution::uniform(4)) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(tsallis_entropy(0.5, Distribution::uniform(2)) == doctest::Approx(kFourRootTwo).epsilon(1e-14));
  CHECK(tsallis_entropy(0.5, Distribution::uniform(2)) == doctest::Approx(1.656854).epsilon(1e-6));
  CHECK_THROWS_AS(tsallis_entropy(1.0, Distribution::uniform(2)), DomainError);
  CHECK_THROWS_AS(tsallis_entropy(0.0, Distribution::uniform(2)), DomainError);
}

TEST_CASE("tsallis entropy is non-negative and largest at uniform") {
  std::mt19937_64 gen(11);
  for (std::size_t d : {2, 3, 8}) {
    for (double q : {0.2, 0.5, 0.8}) {
      const double top = tsallis_entropy(q, Distribution::uniform(d));
      for (int k = 0; k < 200; ++k) {
        const double h = tsallis_entropy(q, Distribution(random_interior(d, gen)));
        CHECK(h >= 0.0);
        CHECK(h <= top + 1e-12);
      }
    }
  }
}

TEST_CASE("beta divergence values") {
  for (double q : {0.3, 0.5, 0.9})
    CHECK(beta_divergence(q, Distribution::uniform(3), Distribution::uniform(3)) ==
          doctest::Approx(0.0).epsilon(1e-12));
  const double v = beta_divergence(0.5, Distribution({1.0, 0.0}), Distribution::uniform(2));
  CHECK(v == doctest::Approx(kFourRootTwo).epsilon(1e-14));
  CHECK(v == doctest::Approx(tsallis_entropy(0.5, Distribution::uniform(2))).epsilon(1e-14));
}

TEST_CASE("beta divergence with a zero reference") {
  CHECK_THROWS_AS(beta_divergence(0.5, Distribution({0.5, 0.5}), Distribution({1.0, 0.0})),
                  SingularInputError);
  // both zero: the term vanishes
  CHECK(beta_divergence(0.5, Distribution({1.0, 0.0}), Distribution({1.0, 0.0})) ==
        doctest::Approx(0.0));
}

TEST_CASE("beta divergence equals the Bregman divergence of the negative entropy") {
  std::mt19937_64 gen(3);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto x = random_interior(3, gen);
    const auto y = random_interior(3, gen);
    const double lib = beta_divergence(0.5, Distribution(x), Distribution(y));
    worst = std::max(worst, std::abs(lib - oracle::bregman_half(x, y)));
    CHECK(lib >= 0.0);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("beta divergence is non-negative for general q") {
  std::mt19937_64 gen(5);
  for (double q : {0.1, 0.5, 0.75}) {
    for (int k = 0; k < 300; ++k) {
      const Distribution x(random_interior(6, gen));
      const Distribution y(random_interior(6, gen));
      CHECK(beta_divergence(q, x, y) >= 0.0);
      CHECK(beta_divergence(q, x, x) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("mix with uniform") {
  const Distribution e = mix_with_uniform(2, TruncationLevel(0.0, 4));
  CHECK(e == Distribution::one_hot(4, 2));
  const Distribution u = mix_with_uniform(0, TruncationLevel(0.25, 4));
  for (std::size_t i = 0; i < 4; ++i) CHECK(u[i] == doctest::Approx(0.25).epsilon(1e-15));
  const Distribution m = mix_with_uniform(1, TruncationLevel(0.05, 4));
  CHECK(m[0] == doctest::Approx(0.05));
  CHECK(m[1] == doctest::Approx(0.85));
  CHECK(m[2] == doctest::Approx(0.05));
  CHECK(m[3] == doctest::Approx(0.05));
  for (std::size_t d : {2, 7, 33}) {
    const TruncationLevel t(0.3 / static_cast<double>(d), d);
    const Distribution x = mix_with_uniform(d / 2, t);
    CHECK(std::accumulate(x.weights().begin(), x.weights().end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x.in_truncated(t.delta));
  }
}

TEST_CASE("problem scale") {
  CHECK(problem_scale(2, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(problem_scale(10000, 16) == doctest::Approx(141.4213562373095).epsilon(1e-14));
  CHECK(problem_scale(1, 1) == doctest::Approx(0.7071067811865476).epsilon(1e-14));
}

TEST_CASE("projection of feasible points is the identity") {
  for (double delta : {0.0, 0.1, 0.25}) {
    const Distribution p = bregman_project_truncated(Distribution::uniform(4), TruncationLevel(delta, 4));
    for (std::size_t i = 0; i < 4; ++i) CHECK(p[i] == doctest::Approx(0.25).epsilon(1e-12));
  }
  const Distribution y({0.2, 0.3, 0.5});
  const Distribution p = bregman_project_truncated(y, TruncationLevel(0.1, 3));
  for (std::size_t i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(y[i]).epsilon(1e-9));
  CHECK_THROWS_AS(bregman_project_truncated(y, TruncationLevel(0.4, 2)), DomainError);
}

TEST_CASE("projection matches a brute-force scan on the 2-simplex") {
  const std::vector<double> y{0.98, 0.01, 0.01};
  const double delta = 0.05;
  const Distribution p = bregman_project_truncated(Distribution(y), TruncationLevel(delta, 3));
  const std::vector<double> zero(3, 0.0);
  const auto ref = oracle::scan_d3(
      [&](std::span<const double> x) { return oracle::omd_objective(x, y, zero, 0.0); }, delta);
  for (std::size_t i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(ref[i]).epsilon(1e-6));
  CHECK(oracle::kkt_residual(p.weights(), y, zero, 0.0, delta) < 1e-8);
}

TEST_CASE("projection satisfies the KKT conditions") {
  std::mt19937_64 gen(17);
  const std::vector<double> zero(64, 0.0);
  for (std::size_t d : {3, 10, 64}) {
    for (int k = 0; k < 50; ++k) {
      auto y = random_interior(d, gen);
      y[0] += 5.0;  // make some coordinates fall below the floor
      const double s = std::accumulate(y.begin(), y.end(), 0.0);
      for (double& v : y) v /= s;
      const double delta = 0.5 / static_cast<double>(d);
      const Distribution p = bregman_project_truncated(Distribution(y), TruncationLevel(delta, d));
      CHECK(p.in_truncated(delta));
      CHECK(std::accumulate(p.weights().begin(), p.weights().end(), 0.0) ==
            doctest::Approx(1.0).epsilon(1e-12));
      CHECK(oracle::kkt_residual(p.weights(), y, std::span(zero).first(d), 0.0, delta) < 1e-8);
    }
  }
}

TEST_CASE("mirror step for general q keeps the floor and the sum") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> loss(0.0, 50.0);
  for (double q : {0.3, 0.5, 0.7}) {
    for (int k = 0; k < 100; ++k) {
      const std::size_t d = 5;
      const double delta = 0.02;
      const auto prev = random_interior(d, gen, delta);
      std::vector<double> g(d), out(d);
      for (double& v : g) v = loss(gen);
      tsallis_mirror_step(q, prev, g, delta, out);
      double s = 0.0;
      for (double v : out) {
        CHECK(v >= delta - 1e-15);
        s += v;
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

}  // TEST_SUITE
