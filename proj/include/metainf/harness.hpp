#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metainf/adversaries.hpp"
#include "metainf/baselines.hpp"
#include "metainf/outer_meta.hpp"
#include "metainf/report.hpp"

namespace metainf {

enum class Algorithm { kMetaInf, kInfReset, kInfKnownPrior, kExp3, kExp3S };

std::string_view to_string(Algorithm a);
// Throws DomainError for unknown names.
Algorithm parse_algorithm(std::string_view name);

struct ExperimentConfig {
  std::size_t S = 1;
  std::size_t T = 1;
  std::size_t d = 2;
  Scenario scenario;
  std::vector<Algorithm> algorithms{Algorithm::kMetaInf};
  ParamOverrides params;
  bool gap_known = true;        // feed the scenario gap to the parameter formulas
  double known_prior_q = 0.5;
  std::optional<double> exp3s_mixing;
  std::vector<std::uint64_t> seeds{1};
  std::uint64_t master_seed = 0;
  std::size_t identify_episodes = 200;
  std::size_t threads = 1;
  bool record_decisions = false;

  // Throws ConfigError naming the offending key.
  void validate() const;
  // Parameter bundle for this configuration.
  MetaParams meta_params() const;
  std::uint64_t cell_seed(std::uint64_t seed) const;
};

// sum_s sum_t (f_{s,t,y} - f_{s,t,j*}).
double total_regret(std::span<const std::vector<std::size_t>> plays, const EpisodeStream& env);

// Meta-INF: learning rate by eps-EWOO, initialisation by FTL, INF with
// guaranteed exploration inside each episode.
RegretReport run_meta_inf(const EpisodeStream& env, const MetaParams& params,
                          bool record_decisions = false);

// Bracket of the total-regret bound as a function of v:
//   explore + min(alpha^2/v, alpha) * lr_slope + lr_log + linear * v + inverse / v.
struct BoundTerms {
  double explore = 0.0;
  double alpha = 0.0;
  double lr_slope = 0.0;
  double lr_log = 0.0;
  double linear = 0.0;
  double inverse = 0.0;

  double operator()(double v) const;
};

struct VMinimum {
  double v;
  double value;
};

// Global minimum on [lo, hi]: log-spaced grid scan, then golden-section
// refinement around the best grid point to relative 1e-9 in v.
VMinimum minimize_bound(const BoundTerms& terms, double lo, double hi);

// Total-regret bound for empirical best-arm distribution psi.
// Throws InfeasibleParamsError when d eps >= 1.
BoundBreakdown regret_bound(const Distribution& psi, const MetaParams& params, std::size_t S);

struct IdentificationResult {
  double empirical_rate;
  double identification_floor;  // 1 - d eps
  std::size_t episodes;
};

// Runs the inner learner alone (phi uniform, eta = first-episode EWOO rate)
// on `episodes` independent gap-respecting episodes.
IdentificationResult identification_experiment(const ExperimentConfig& config);

struct ExperimentResult {
  std::optional<MetaParams> params;  // present when Meta-INF was run
  std::vector<RegretReport> reports;  // seed-major, algorithms in config order
};

ExperimentResult run_experiment(const ExperimentConfig& config);

struct SummaryRow {
  std::string algorithm;
  std::size_t seeds = 0;
  double mean_total_regret = 0.0;
  double std_total_regret = 0.0;
  std::optional<double> bound_value;
  std::optional<BoundBreakdown> bound;  // seed-averaged terms (Meta-INF only)
};

std::vector<SummaryRow> summarize(const ExperimentConfig& config, const ExperimentResult& result);

// CSV writers. Numbers use 17 significant digits so they parse back exactly.
std::string format_number(double x);
void write_episode_csv(std::ostream& out, const ExperimentResult& result);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
void write_decisions_csv(std::ostream& out, const ExperimentResult& result, std::size_t T,
                         std::size_t d);

}  // namespace metainf
