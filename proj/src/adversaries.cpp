#include "metainf/adversaries.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metainf/errors.hpp"
#include "metainf/inner_inf.hpp"

namespace metainf {

EpisodeLosses::EpisodeLosses(std::size_t T, std::size_t d, std::vector<double> losses,
                             std::size_t true_best_arm)
    : T_(T), d_(d), losses_(std::move(losses)), best_(true_best_arm) {
  if (T_ == 0 || d_ == 0) throw DomainError("episode needs at least one round and one arm");
  if (losses_.size() != T_ * d_) throw DomainError("loss table shape mismatch");
  if (best_ >= d_) throw DomainError("best arm out of range");
  for (double f : losses_)
    if (!(f >= 0.0 && f <= 1.0)) throw DomainError("loss " + std::to_string(f) + " outside [0,1]");
}

double EpisodeLosses::mean_loss(std::size_t i) const {
  double s = 0.0;
  for (std::size_t t = 0; t < T_; ++t) s += losses_[t * d_ + i];
  return s / static_cast<double>(T_);
}

std::size_t EpisodeLosses::argmin_cumulative() const {
  std::vector<double> cum(d_, 0.0);
  for (std::size_t t = 0; t < T_; ++t)
    for (std::size_t i = 0; i < d_; ++i) cum[i] += losses_[t * d_ + i];
  return estimate_best_arm(cum);
}

GapSettings::GapSettings(double gap_, double base_loss_, double noise_amp_)
    : gap(gap_), base_loss(base_loss_), noise_amp(noise_amp_) {
  if (!(gap > 0.0 && gap <= 0.6)) throw DomainError("gap must lie in (0, 0.6]");
  if (!(base_loss > 0.0 && base_loss < 1.0)) throw DomainError("base loss must lie in (0,1)");
  if (!(noise_amp >= 0.0)) throw DomainError("noise amplitude must be non-negative");
  if (base_loss - noise_amp < 0.0 || base_loss + gap + noise_amp > 1.0 + 1e-15)
    throw DomainError("gap settings push losses outside [0,1]");
}

GapSettings GapSettings::with_defaults(double gap, double base_loss) {
  const double amp = std::max(0.0, std::min({0.25, base_loss, 1.0 - base_loss - gap}));
  return GapSettings(gap, base_loss, amp);
}

Prior few_good_arms_prior(std::size_t k, double zeta, std::size_t d) {
  if (k == 0 || k >= d) throw DomainError("few-good-arms prior needs 1 <= k < d");
  if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("zeta must lie in (0,1)");
  std::vector<double> w(d);
  for (std::size_t i = 0; i < d; ++i)
    w[i] = i < k ? (1.0 - zeta) / static_cast<double>(k) : zeta / static_cast<double>(d - k);
  return Prior{Distribution(std::move(w))};
}

std::vector<std::size_t> sample_best_arm_sequence(const Prior& prior, std::size_t S, Rng& rng) {
  std::vector<std::size_t> out(S);
  for (auto& j : out) j = sample_arm(prior.weights.weights(), rng);
  return out;
}

EpisodeLosses gen_episode_losses(std::size_t best, const GapSettings& gaps, std::size_t T,
                                 std::size_t d, Rng& rng) {
  if (best >= d) throw DomainError("best arm out of range");
  if (T == 0) throw DomainError("episode needs at least one round");
  std::vector<double> f(T * d);
  for (std::size_t i = 0; i < d; ++i) {
    const double mean = (i == best) ? gaps.base_loss : gaps.base_loss + gaps.gap;
    std::size_t t = 0;
    for (; t + 1 < T; t += 2) {
      const double u = gaps.noise_amp > 0.0 ? rng.uniform(-gaps.noise_amp, gaps.noise_amp) : 0.0;
      f[t * d + i] = std::clamp(mean + u, 0.0, 1.0);
      f[(t + 1) * d + i] = std::clamp(mean - u, 0.0, 1.0);
    }
    if (t < T) f[t * d + i] = mean;
  }
  return EpisodeLosses(T, d, std::move(f), best);
}

Distribution empirical_best_arm_distribution(std::span<const std::size_t> best_arms,
                                             std::size_t d) {
  if (best_arms.empty()) throw DomainError("empirical distribution of an empty sequence");
  std::vector<double> counts(d, 0.0);
  for (std::size_t j : best_arms) {
    if (j >= d) throw DomainError("best arm out of range");
    counts[j] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(best_arms.size());
  return Distribution(std::move(counts));
}

bool verify_gap(const EpisodeLosses& ep, double gap) {
  const std::size_t best = ep.true_best_arm();
  const double best_mean = ep.mean_loss(best);
  for (std::size_t i = 0; i < ep.arms(); ++i) {
    if (i == best) continue;
    if (ep.mean_loss(i) - best_mean < gap - 1e-12) return false;
  }
  return true;
}

GapSettings Scenario::gap_settings() const {
  return noise_amp ? GapSettings(gap, base_loss, *noise_amp) : GapSettings::with_defaults(gap, base_loss);
}

Prior Scenario::prior(std::size_t d) const {
  switch (prior_kind) {
    case PriorKind::kUniform:
      return Prior{Distribution::uniform(d)};
    case PriorKind::kFewGoodArms:
      return few_good_arms_prior(k, zeta, d);
    case PriorKind::kFixedSequence:
      return Prior{empirical_best_arm_distribution(fixed_sequence, d)};
  }
  throw DomainError("unknown prior kind");
}

std::vector<std::size_t> Scenario::best_arms(std::size_t S, std::size_t d,
                                             std::uint64_t cell_seed) const {
  if (prior_kind == PriorKind::kFixedSequence) {
    if (fixed_sequence.empty()) throw DomainError("fixed best-arm sequence is empty");
    std::vector<std::size_t> out(S);
    for (std::size_t s = 0; s < S; ++s) {
      out[s] = fixed_sequence[s % fixed_sequence.size()];
      if (out[s] >= d) throw DomainError("fixed best arm out of range");
    }
    return out;
  }
  Rng rng(derive_seed(cell_seed, Stream::kBestArms));
  return sample_best_arm_sequence(prior(d), S, rng);
}

EpisodeLosses Scenario::episode(std::size_t s, std::size_t best, std::size_t T, std::size_t d,
                                std::uint64_t cell_seed) const {
  Rng rng(derive_seed(cell_seed, Stream::kLosses, s));
  return gen_episode_losses(best, gap_settings(), T, d, rng);
}

}  // namespace metainf
