#include "metainf/inner_inf.hpp"

#include <cassert>
#include <string>

#include "metainf/adversaries.hpp"
#include "metainf/errors.hpp"

namespace metainf {

InnerParams::InnerParams(Distribution phi_, double eta_, TruncationLevel trunc_)
    : phi(std::move(phi_)), eta(eta_), trunc(trunc_) {
  if (phi.size() != trunc.d) throw DomainError("initialisation has the wrong dimension");
  if (!phi.in_truncated(trunc.delta)) throw DomainError("initialisation leaves the truncated simplex");
  if (!(eta > 0.0)) throw DomainError("learning rate must be positive");
}

std::size_t sample_arm(std::span<const double> x, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0) continue;
    acc += x[i];
    last_positive = i;
    if (u < acc) return i;
  }
  // u landed in the rounding slack above the cumulative sum.
  return last_positive;
}

std::vector<double> estimate_loss(std::size_t played, double observed_loss,
                                  std::span<const double> x) {
  if (played >= x.size()) throw DomainError("played arm out of range");
  if (!(x[played] > 0.0))
    throw SingularInputError("played arm " + std::to_string(played) + " has zero probability");
  std::vector<double> g(x.size(), 0.0);
  g[played] = observed_loss / x[played];
  return g;
}

Distribution omd_update(const Distribution& x_t, std::span<const double> g, double eta,
                        const TruncationLevel& trunc) {
  if (x_t.size() != trunc.d || g.size() != trunc.d)
    throw DomainError("update dimension mismatch");
  if (!(eta > 0.0)) throw DomainError("learning rate must be positive");
  std::vector<double> scaled(g.begin(), g.end());
  for (double& v : scaled) v *= eta;
  std::vector<double> out(trunc.d);
  tsallis_mirror_step(0.5, x_t.weights(), scaled, trunc.delta, out);
  return Distribution::trusted(std::move(out));
}

std::size_t estimate_best_arm(std::span<const double> cum_est_loss) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < cum_est_loss.size(); ++i)
    if (cum_est_loss[i] < cum_est_loss[best]) best = i;
  return best;
}

InfLearner::InfLearner(const Distribution& phi, double eta, double delta, double q)
    : state_(phi), eta_(eta), delta_(delta), q_(q), scaled_(phi.size(), 0.0), next_(phi.size()) {
  if (!(eta > 0.0)) throw DomainError("learning rate must be positive");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("Tsallis parameter q must lie in (0,1)");
  TruncationLevel check(delta, phi.size());
  (void)check;
}

std::size_t InfLearner::choose(Rng& rng) {
  last_play_ = sample_arm(state_.x, rng);
  return last_play_;
}

void InfLearner::observe(double loss) {
  const double p = state_.x[last_play_];
  if (!(p > 0.0))
    throw SingularInputError("played arm " + std::to_string(last_play_) + " has zero probability");
  const double estimate = loss / p;
  state_.cum_est_loss[last_play_] += estimate;
  ++state_.t;
  if (estimate == 0.0) return;  // zero loss leaves x_t unchanged

  scaled_[last_play_] = eta_ * estimate;
  try {
    // With zero loss the step is the identity at lambda = 0, so 0 sits just
    // right of the root and one Newton step lands close to it.
    const auto stats = tsallis_mirror_step(q_, state_.x, scaled_, delta_, next_, 0.0,
                                           /*use_hint=*/true);
    state_.lambda = stats.lambda;
  } catch (NumericalError& e) {
    e.round = state_.t - 1;
    scaled_[last_play_] = 0.0;
    throw;
  }
  scaled_[last_play_] = 0.0;
  state_.x.swap(next_);
#ifndef NDEBUG
  for (double xi : state_.x) assert(xi >= delta_ - 1e-12);
#endif
}

EpisodeResult run_episode(const EpisodeLosses& losses, const InnerParams& params, Rng& rng,
                          bool record_decisions) {
  if (losses.arms() != params.trunc.d) throw DomainError("episode and learner disagree on d");
  const std::size_t T = losses.rounds();
  InfLearner learner(params.phi, params.eta, params.trunc.delta);
  EpisodeResult result;
  result.plays.reserve(T);
  result.true_best_arm = losses.true_best_arm();
  if (record_decisions) result.per_round_decisions.emplace().reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    if (record_decisions)
      result.per_round_decisions->push_back(Distribution::trusted(
          std::vector<double>(learner.decision().begin(), learner.decision().end())));
    const std::size_t y = learner.choose(rng);
    const double f = losses.loss(t, y);
    result.plays.push_back(y);
    result.incurred_loss += f;
    learner.observe(f);
  }
  result.est_best_arm = learner.best_arm();
  return result;
}

}  // namespace metainf
