#include "metainf/report.hpp"

#include <numeric>

namespace metainf {

EpisodeStream::EpisodeStream(Scenario scenario, std::size_t S, std::size_t T, std::size_t d,
                             std::uint64_t cell_seed)
    : scenario_(std::move(scenario)), S_(S), T_(T), d_(d), seed_(cell_seed) {
  best_ = scenario_.best_arms(S_, d_, seed_);
}

EpisodeLosses EpisodeStream::episode(std::size_t s) const {
  return scenario_.episode(s, best_.at(s), T_, d_, seed_);
}

void finalize_report(RegretReport& report, std::size_t d) {
  report.total_regret = std::accumulate(report.per_episode_regret.begin(),
                                        report.per_episode_regret.end(), 0.0);
  if (!report.true_best_arm.empty())
    report.psi = empirical_best_arm_distribution(report.true_best_arm, d);
  if (!report.est_best_arm.empty())
    report.psi_hat = empirical_best_arm_distribution(report.est_best_arm, d);
}

}  // namespace metainf
