#include "metainf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "metainf/errors.hpp"
#include "metainf/inner_inf.hpp"

namespace metainf {

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kInfReset: return "inf_reset";
    case BaselineKind::kInfKnownPrior: return "inf_known_prior";
    case BaselineKind::kExp3: return "exp3";
    case BaselineKind::kExp3S: return "exp3s";
  }
  return "unknown";
}

namespace {

// Runs restarted INF with a fixed (phi, eta) on every episode.
RegretReport run_fixed_inf(const EpisodeStream& env, const Distribution& phi, double eta, double q,
                           std::string name) {
  RegretReport report;
  report.algorithm = std::move(name);
  report.seed = env.cell_seed();
  const std::size_t S = env.episodes();
  for (std::size_t s = 0; s < S; ++s) {
    const EpisodeLosses losses = env.episode(s);
    Rng rng(derive_seed(env.cell_seed(), Stream::kPlays, s));
    InfLearner learner(phi, eta, 0.0, q);
    const std::size_t best = losses.true_best_arm();
    double regret = 0.0;
    for (std::size_t t = 0; t < losses.rounds(); ++t) {
      const std::size_t y = learner.choose(rng);
      const double f = losses.loss(t, y);
      regret += f - losses.loss(t, best);
      learner.observe(f);
    }
    const std::size_t est = learner.best_arm();
    report.per_episode_regret.push_back(regret);
    report.chosen_eta.push_back(eta);
    report.true_best_arm.push_back(best);
    report.est_best_arm.push_back(est);
    report.identification_correct.push_back(est == best ? 1 : 0);
  }
  report.last_init = phi;
  finalize_report(report, env.arms());
  return report;
}

}  // namespace

RegretReport run_inf_reset(const EpisodeStream& env) {
  const std::size_t d = env.arms();
  const Distribution phi = Distribution::uniform(d);
  const double h = tsallis_entropy(0.5, phi);
  const double eta =
      std::sqrt(2.0 * h / (static_cast<double>(env.rounds()) * std::sqrt(static_cast<double>(d))));
  RegretReport report = run_fixed_inf(env, phi, eta, 0.5, std::string(to_string(BaselineKind::kInfReset)));
  report.reference_bound = static_cast<double>(env.episodes()) *
                           std::sqrt(2.0 * h * static_cast<double>(env.rounds()) *
                                     std::sqrt(static_cast<double>(d)));
  return report;
}

RegretReport run_inf_known_prior(const EpisodeStream& env, const Prior& prior, double q,
                                 double floor) {
  const std::size_t d = env.arms();
  if (prior.weights.size() != d) throw DomainError("prior dimension mismatch");
  std::vector<double> w = prior.weights.vector();
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (w[i] <= 0.0 && floor <= 0.0)
      throw SingularInputError("prior has zero mass at arm " + std::to_string(i) +
                               "; beta divergence needs a positive reference");
    w[i] = std::max(w[i], floor);
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  const Distribution phi = Distribution::trusted(std::move(w));
  const double h = tsallis_entropy(q, phi);
  const double Td = static_cast<double>(env.rounds());
  const double dq = std::pow(static_cast<double>(d), q);
  if (!(h > 0.0)) throw SingularInputError("prior entropy is zero; learning rate undefined");
  const double eta = std::sqrt(2.0 * h / (Td * dq));
  RegretReport report =
      run_fixed_inf(env, phi, eta, q, std::string(to_string(BaselineKind::kInfKnownPrior)));
  report.reference_bound = static_cast<double>(env.episodes()) * std::sqrt(2.0 * h * Td * dq);
  return report;
}

RegretReport run_exp3(const EpisodeStream& env) {
  const std::size_t d = env.arms();
  const double dd = static_cast<double>(d);
  const double eta = std::sqrt(2.0 * std::log(dd) / (static_cast<double>(env.rounds()) * dd));
  RegretReport report;
  report.algorithm = std::string(to_string(BaselineKind::kExp3));
  report.seed = env.cell_seed();
  std::vector<double> cum(d), p(d);
  for (std::size_t s = 0; s < env.episodes(); ++s) {
    const EpisodeLosses losses = env.episode(s);
    Rng rng(derive_seed(env.cell_seed(), Stream::kPlays, s));
    std::fill(cum.begin(), cum.end(), 0.0);
    const std::size_t best = losses.true_best_arm();
    double regret = 0.0;
    for (std::size_t t = 0; t < losses.rounds(); ++t) {
      const double lo = *std::min_element(cum.begin(), cum.end());
      double z = 0.0;
      for (std::size_t i = 0; i < d; ++i) z += p[i] = std::exp(-eta * (cum[i] - lo));
      for (double& x : p) x /= z;
      const std::size_t y = sample_arm(p, rng);
      const double f = losses.loss(t, y);
      regret += f - losses.loss(t, best);
      cum[y] += f / p[y];
    }
    const std::size_t est = estimate_best_arm(cum);
    report.per_episode_regret.push_back(regret);
    report.chosen_eta.push_back(eta);
    report.true_best_arm.push_back(best);
    report.est_best_arm.push_back(est);
    report.identification_correct.push_back(est == best ? 1 : 0);
  }
  finalize_report(report, d);
  return report;
}

Exp3SRates exp3s_default_rates(std::size_t d, std::size_t horizon, std::size_t switches) {
  const double K = static_cast<double>(d);
  const double Tp = static_cast<double>(horizon);
  const double e = std::numbers::e;
  const double mixing = std::min(
      1.0, std::sqrt(K * (static_cast<double>(switches) * std::log(K * Tp) + e) / ((e - 1.0) * Tp)));
  return {mixing, 1.0 / Tp};
}

RegretReport run_exp3s(const EpisodeStream& env, std::optional<double> mixing) {
  const std::size_t d = env.arms();
  const double K = static_cast<double>(d);
  const std::size_t horizon = env.episodes() * env.rounds();
  Exp3SRates rates = exp3s_default_rates(d, horizon, env.episodes());
  if (mixing) {
    if (!(*mixing > 0.0 && *mixing <= 1.0)) throw DomainError("Exp3.S mixing must lie in (0,1]");
    rates.mixing = *mixing;
  }
  const double gamma = rates.mixing;
  const double share = std::numbers::e * rates.share / K;

  RegretReport report;
  report.algorithm = std::string(to_string(BaselineKind::kExp3S));
  report.seed = env.cell_seed();
  std::vector<double> w(d, 1.0 / K), p(d), cum(d);
  for (std::size_t s = 0; s < env.episodes(); ++s) {
    const EpisodeLosses losses = env.episode(s);
    Rng rng(derive_seed(env.cell_seed(), Stream::kPlays, s));
    std::fill(cum.begin(), cum.end(), 0.0);
    const std::size_t best = losses.true_best_arm();
    double regret = 0.0;
    for (std::size_t t = 0; t < losses.rounds(); ++t) {
      // w is kept normalised; the update is homogeneous in w.
      for (std::size_t i = 0; i < d; ++i) p[i] = (1.0 - gamma) * w[i] + gamma / K;
      const std::size_t y = sample_arm(p, rng);
      const double f = losses.loss(t, y);
      regret += f - losses.loss(t, best);
      cum[y] += f / p[y];
      const double reward_est = (1.0 - f) / p[y];
      double z = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double boost = (i == y) ? std::exp(gamma * reward_est / K) : 1.0;
        w[i] = w[i] * boost + share;  // sum of the normalised weights is 1
        z += w[i];
      }
      for (double& x : w) x /= z;
    }
    const std::size_t est = estimate_best_arm(cum);
    report.per_episode_regret.push_back(regret);
    report.chosen_eta.push_back(gamma);
    report.true_best_arm.push_back(best);
    report.est_best_arm.push_back(est);
    report.identification_correct.push_back(est == best ? 1 : 0);
  }
  finalize_report(report, d);
  return report;
}

}  // namespace metainf
