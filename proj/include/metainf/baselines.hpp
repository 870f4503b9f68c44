#pragma once

#include <optional>
#include <string_view>

#include "metainf/report.hpp"

namespace metainf {

enum class BaselineKind { kInfReset, kInfKnownPrior, kExp3, kExp3S };

std::string_view to_string(BaselineKind kind);

// Vanilla INF (q = 1/2, no truncation) restarted from uniform every episode
// with eta = sqrt(2 H_{1/2}(uniform) / (T sqrt(d))).
RegretReport run_inf_reset(const EpisodeStream& env);

// INF initialised at the prior with eta = sqrt(2 H_q(P) / (T d^q)).
// Components below `floor` are lifted to it before renormalising; with
// floor = 0 a zero component throws SingularInputError. reference_bound is
// S sqrt(2 H_q(P) T d^q).
RegretReport run_inf_known_prior(const EpisodeStream& env, const Prior& prior, double q = 0.5,
                                 double floor = 1e-12);

// Exponential weights on importance-weighted losses, restarted every episode,
// eta = sqrt(2 ln d / (T d)).
RegretReport run_exp3(const EpisodeStream& env);

// Mixing rate and share rate of Exp3.S for `switches` best-arm changes over
// `horizon` rounds on d arms:
//   gamma = min(1, sqrt(d (switches ln(d horizon) + e) / ((e - 1) horizon))),
//   share = 1 / horizon.
struct Exp3SRates {
  double mixing;
  double share;
};
Exp3SRates exp3s_default_rates(std::size_t d, std::size_t horizon, std::size_t switches);

// Exp3.S over the concatenated S*T rounds without restarts. Rewards are
// 1 - loss. `mixing` defaults to exp3s_default_rates(d, S*T, S).mixing.
RegretReport run_exp3s(const EpisodeStream& env, std::optional<double> mixing = std::nullopt);

}  // namespace metainf
