#include <doctest.h>

#include <cmath>

#include "metainf/baselines.hpp"
#include "metainf/errors.hpp"
#include "metainf/inner_inf.hpp"

using namespace metainf;

namespace {

Scenario uniform_scenario(double gap) {
  Scenario sc;
  sc.gap = gap;
  return sc;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("single-episode reset INF is one INF run") {
  const EpisodeStream env(uniform_scenario(0.4), 1, 500, 3, 77);
  const RegretReport r = run_inf_reset(env);
  REQUIRE(r.per_episode_regret.size() == 1);

  const EpisodeLosses ep = env.episode(0);
  const double eta = std::sqrt(2.0 * tsallis_entropy(0.5, Distribution::uniform(3)) /
                               (500.0 * std::sqrt(3.0)));
  Rng rng(derive_seed(77, Stream::kPlays, 0));
  const EpisodeResult e =
      run_episode(ep, InnerParams(Distribution::uniform(3), eta, TruncationLevel(0.0, 3)), rng);
  double best = 0.0;
  for (std::size_t t = 0; t < 500; ++t) best += ep.loss(t, ep.true_best_arm());
  CHECK(r.per_episode_regret[0] == doctest::Approx(e.incurred_loss - best).epsilon(1e-12));
  CHECK(r.est_best_arm[0] == e.est_best_arm);
}

TEST_CASE("identical arms give zero regret") {
  // gap is tiny and noise absent: every arm has (almost) the same loss
  Scenario sc;
  sc.gap = 1e-9;
  sc.noise_amp = 0.0;
  const EpisodeStream env(sc, 5, 200, 4, 3);
  for (const RegretReport& r : {run_inf_reset(env), run_exp3(env), run_exp3s(env)})
    CHECK(std::abs(r.total_regret) < 1e-5);
}

TEST_CASE("reset INF stays within twice its closed-form bound") {
  double mean = 0.0;
  const int seeds = 50;
  double bound = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const EpisodeStream env(uniform_scenario(0.5), 1, 10000, 2, 1000 + s);
    const RegretReport r = run_inf_reset(env);
    mean += r.total_regret / seeds;
    bound = *r.reference_bound;
  }
  CHECK(bound == doctest::Approx(std::sqrt(2.0 * 4.0 * (std::sqrt(2.0) - 1.0) * 10000 * std::sqrt(2.0))));
  CHECK(mean <= 2.0 * bound);
  CHECK(mean > 0.0);
}

TEST_CASE("known-prior INF with a uniform prior matches reset INF") {
  double diff = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const EpisodeStream env(uniform_scenario(0.3), 4, 2000, 4, s);
    const RegretReport a = run_inf_reset(env);
    const RegretReport b = run_inf_known_prior(env, Prior{Distribution::uniform(4)});
    diff += std::abs(a.total_regret - b.total_regret);
    CHECK(*a.reference_bound == doctest::Approx(*b.reference_bound));
  }
  CHECK(diff / 10 < 1.0);
}

TEST_CASE("known-prior bound value") {
  const std::size_t d = 16, T = 5000;
  const Prior p = few_good_arms_prior(2, 1.0 / 16, d);
  Scenario sc;
  sc.prior_kind = PriorKind::kFewGoodArms;
  sc.k = 2;
  sc.zeta = 1.0 / 16;
  const EpisodeStream env(sc, 2, T, d, 5);
  const RegretReport r = run_inf_known_prior(env, p);
  const double h = tsallis_entropy(0.5, p.weights);
  CHECK(*r.reference_bound == doctest::Approx(2.0 * std::sqrt(2.0 * h * T * 4.0)).epsilon(1e-12));

  const Prior sharp = few_good_arms_prior(1, 1e-9, 4);
  CHECK(tsallis_entropy(0.5, sharp.weights) < 1e-3);
}

TEST_CASE("known-prior INF floors zero components") {
  const EpisodeStream env(uniform_scenario(0.3), 2, 300, 3, 1);
  CHECK_NOTHROW(run_inf_known_prior(env, Prior{Distribution({0.5, 0.5, 0.0})}));
  CHECK_THROWS_AS(run_inf_known_prior(env, Prior{Distribution({0.5, 0.5, 0.0})}, 0.5, 0.0),
                  SingularInputError);
}

TEST_CASE("known-prior INF with other q") {
  const EpisodeStream env(uniform_scenario(0.3), 3, 1000, 3, 2);
  const RegretReport r = run_inf_known_prior(env, Prior{Distribution({0.5, 0.3, 0.2})}, 0.7);
  CHECK(r.per_episode_regret.size() == 3);
  CHECK(std::isfinite(r.total_regret));
}

TEST_CASE("Exp3.S with full mixing plays uniformly") {
  const std::size_t S = 4, T = 5000, d = 4;
  const EpisodeStream env(uniform_scenario(0.5), S, T, d, 11);
  const RegretReport r = run_exp3s(env, 1.0);
  // uniform play: expected regret S T (d-1)/d gap; the variance of one
  // round's regret is at most gap^2 (d-1)/d^2 plus the noise
  const double expected = S * T * 0.75 * 0.5;
  CHECK(std::abs(r.total_regret - expected) < 4.0 * std::sqrt(S * T * 0.25));
  CHECK_THROWS_AS(run_exp3s(env, 0.0), DomainError);
}

TEST_CASE("Exp3.S regret is sublinear in a single episode") {
  // one constant best arm: regret(2T)/regret(T) well below 2
  auto mean_regret = [](std::size_t T) {
    double m = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const EpisodeStream env(uniform_scenario(0.5), 1, T, 4, 100 + s);
      m += run_exp3s(env).total_regret / 10.0;
    }
    return m;
  };
  const double r1 = mean_regret(4000);
  const double r2 = mean_regret(16000);
  CHECK(r2 < 3.0 * r1);
}

TEST_CASE("Exp3.S default rates") {
  const Exp3SRates r = exp3s_default_rates(4, 1000000, 100);
  CHECK(r.mixing == doctest::Approx(std::sqrt(4.0 * (100.0 * std::log(4e6) + std::exp(1.0)) /
                                              ((std::exp(1.0) - 1.0) * 1e6))));
  CHECK(r.share == 1e-6);
  CHECK(exp3s_default_rates(4, 10, 10).mixing == 1.0);
}

TEST_CASE("baselines are reproducible") {
  const EpisodeStream env(uniform_scenario(0.4), 3, 400, 3, 8);
  CHECK(run_exp3(env).per_episode_regret == run_exp3(env).per_episode_regret);
  CHECK(run_exp3s(env).per_episode_regret == run_exp3s(env).per_episode_regret);
  CHECK(run_inf_reset(env).per_episode_regret == run_inf_reset(env).per_episode_regret);
}

}  // TEST_SUITE
