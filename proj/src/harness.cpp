#include "metainf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "metainf/errors.hpp"
#include "metainf/inner_inf.hpp"

namespace metainf {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kMetaInf: return "meta_inf";
    case Algorithm::kInfReset: return to_string(BaselineKind::kInfReset);
    case Algorithm::kInfKnownPrior: return to_string(BaselineKind::kInfKnownPrior);
    case Algorithm::kExp3: return to_string(BaselineKind::kExp3);
    case Algorithm::kExp3S: return to_string(BaselineKind::kExp3S);
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kMetaInf, Algorithm::kInfReset, Algorithm::kInfKnownPrior,
                      Algorithm::kExp3, Algorithm::kExp3S}) {
    if (to_string(a) == name) return a;
  }
  throw DomainError("unknown algorithm '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (S < 1) throw ConfigError("experiment.S", "must be at least 1");
  if (T < 1) throw ConfigError("experiment.T", "must be at least 1");
  if (d < 2) throw ConfigError("experiment.d", "must be at least 2");
  if (seeds.empty()) throw ConfigError("experiment.seeds", "at least one seed is required");
  if (algorithms.empty()) throw ConfigError("experiment.algorithms", "at least one algorithm is required");
  if (threads < 1) throw ConfigError("experiment.threads", "must be at least 1");
  if (identify_episodes < 1) throw ConfigError("experiment.identify_episodes", "must be at least 1");
  if (!(known_prior_q > 0.0 && known_prior_q < 1.0))
    throw ConfigError("baselines.known_prior_q", "must lie in (0,1)");
  try {
    (void)scenario.gap_settings();
  } catch (const DomainError& e) {
    throw ConfigError("scenario.gap", e.what());
  }
  switch (scenario.prior_kind) {
    case PriorKind::kUniform:
      break;
    case PriorKind::kFewGoodArms:
      if (scenario.k < 1 || scenario.k >= d) throw ConfigError("scenario.k", "needs 1 <= k < d");
      if (!(scenario.zeta > 0.0 && scenario.zeta < 1.0))
        throw ConfigError("scenario.zeta", "must lie in (0,1)");
      break;
    case PriorKind::kFixedSequence:
      if (scenario.fixed_sequence.empty())
        throw ConfigError("scenario.sequence", "fixed prior needs a non-empty sequence");
      for (std::size_t j : scenario.fixed_sequence)
        if (j >= d) throw ConfigError("scenario.sequence", "arm index out of range");
      break;
  }
}

MetaParams ExperimentConfig::meta_params() const {
  return compute_params(T, d, S, gap_known ? std::optional<double>(scenario.gap) : std::nullopt,
                        params);
}

std::uint64_t ExperimentConfig::cell_seed(std::uint64_t seed) const {
  return derive_seed(master_seed, Stream::kCell, seed);
}

double total_regret(std::span<const std::vector<std::size_t>> plays, const EpisodeStream& env) {
  if (plays.size() != env.episodes()) throw DomainError("plays do not cover every episode");
  double total = 0.0;
  for (std::size_t s = 0; s < plays.size(); ++s) {
    const EpisodeLosses ep = env.episode(s);
    if (plays[s].size() != ep.rounds()) throw DomainError("plays do not cover every round");
    const std::size_t best = ep.true_best_arm();
    for (std::size_t t = 0; t < ep.rounds(); ++t) {
      if (plays[s][t] >= ep.arms()) throw DomainError("played arm out of range");
      total += ep.loss(t, plays[s][t]) - ep.loss(t, best);
    }
  }
  return total;
}

RegretReport run_meta_inf(const EpisodeStream& env, const MetaParams& params,
                          bool record_decisions) {
  const std::size_t d = env.arms();
  if (params.d != d || params.T != env.rounds())
    throw DomainError("parameters were computed for a different problem size");
  const TruncationLevel trunc = params.trunc();

  LrMetaState lr(params);
  InitMetaState init(d);
  RegretReport report;
  report.algorithm = std::string(to_string(Algorithm::kMetaInf));
  report.seed = env.cell_seed();

  for (std::size_t s = 0; s < env.episodes(); ++s) {
    const double eta = eps_ewoo_predict(lr);
    Distribution phi = ftl_predict(init, trunc);
    const EpisodeLosses losses = env.episode(s);
    const std::size_t best = losses.true_best_arm();
    Rng rng(derive_seed(env.cell_seed(), Stream::kPlays, s));

    InfLearner learner(phi, eta, trunc.delta);
    double regret = 0.0;
    try {
      for (std::size_t t = 0; t < losses.rounds(); ++t) {
        if (record_decisions)
          report.decisions.insert(report.decisions.end(), learner.decision().begin(),
                                  learner.decision().end());
        const std::size_t y = learner.choose(rng);
        const double f = losses.loss(t, y);
        regret += f - losses.loss(t, best);
        learner.observe(f);
      }
    } catch (NumericalError& e) {
      e.episode = s;
      throw;
    }
    const std::size_t est = learner.best_arm();
    const double divergence = beta_divergence(0.5, mix_with_uniform(est, trunc), phi);
    lr = eps_ewoo_update(std::move(lr), divergence);
    init = ftl_update(std::move(init), est);

    report.per_episode_regret.push_back(regret);
    report.chosen_eta.push_back(eta);
    report.true_best_arm.push_back(best);
    report.est_best_arm.push_back(est);
    report.identification_correct.push_back(est == best ? 1 : 0);
    if (s + 1 == env.episodes()) report.last_init = std::move(phi);
  }
  finalize_report(report, d);
  report.bound = regret_bound(*report.psi, params, env.episodes());
  return report;
}

double BoundTerms::operator()(double v) const {
  return explore + std::min(alpha * alpha / v, alpha) * lr_slope + lr_log + linear * v +
         inverse / v;
}

VMinimum minimize_bound(const BoundTerms& f, double lo, double hi) {
  if (!(lo > 0.0 && hi > lo)) throw DomainError("v search interval must be 0 < lo < hi");
  // The min(alpha^2/v, alpha) kink can leave two local minima, so scan first.
  constexpr int kGrid = 4000;
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / kGrid;
  int best_k = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kGrid; ++k) {
    const double v = std::exp(log_lo + step * k);
    const double val = f(v);
    if (val < best_val) {
      best_val = val;
      best_k = k;
    }
  }
  double a = std::exp(log_lo + step * std::max(0, best_k - 1));
  double b = std::exp(log_lo + step * std::min(kGrid, best_k + 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 500 && (b - a) > 1e-9 * std::max(std::abs(c), 1e-300); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double v = 0.5 * (a + b);
  const double val = f(v);
  if (val <= best_val) return {v, val};
  return {std::exp(log_lo + step * best_k), best_val};
}

BoundBreakdown regret_bound(const Distribution& psi, const MetaParams& p, std::size_t S) {
  const double keep = p.one_minus_d_eps();
  if (!(keep > 0.0)) throw InfeasibleParamsError("d * eps_delta >= 1: bound is vacuous", 0.0);
  if (psi.size() != p.d) throw DomainError("psi dimension mismatch");
  const double Sd = static_cast<double>(S);
  const double dd = static_cast<double>(p.d);
  const double sqrt_delta = std::sqrt(p.delta);

  BoundBreakdown b;
  b.u_expl = p.delta * static_cast<double>(p.T) * (dd - 1.0);
  b.u_lr_slope = Sd * p.sigma;
  b.u_lr_log = std::numbers::sqrt2 * p.sigma * (1.0 + std::log(Sd + 1.0)) /
               (p.alpha * p.alpha * keep * std::sqrt(keep) * std::pow(p.delta, 0.75));
  b.u_init = 4.0 * std::numbers::sqrt2 * std::sqrt(dd / p.delta) * (std::log(Sd) + 1.0);
  b.u_psi = 6.0 * Sd * dd * p.eps_delta / sqrt_delta;
  b.entropy_term = tsallis_entropy(0.5, psi) * Sd;

  BoundTerms terms;
  terms.explore = b.u_expl * Sd;
  terms.alpha = p.alpha;
  terms.lr_slope = b.u_lr_slope;
  terms.lr_log = b.u_lr_log;
  terms.linear = p.sigma * Sd;
  terms.inverse = p.sigma / keep * (b.u_init + b.u_psi + b.entropy_term);

  const double x = (b.u_init + b.u_psi + b.entropy_term) / (keep * Sd);
  const double hi = 10.0 * std::sqrt(p.alpha * p.alpha + x);
  const VMinimum m = minimize_bound(terms, 1e-6, std::max(hi, 2e-6));
  b.v_star = m.v;
  b.bound_value = m.value;
  b.u_lr = std::min(p.alpha * p.alpha / m.v, p.alpha) * b.u_lr_slope + b.u_lr_log;
  return b;
}

IdentificationResult identification_experiment(const ExperimentConfig& config) {
  config.validate();
  const MetaParams params = config.meta_params();
  const double eta = eps_ewoo_predict(LrMetaState(params));
  const TruncationLevel trunc = params.trunc();
  const std::size_t n = config.identify_episodes;
  const std::uint64_t cell = config.cell_seed(config.seeds.front());
  const std::vector<std::size_t> best = config.scenario.best_arms(n, config.d, cell);
  const InnerParams inner(Distribution::uniform(config.d), eta, trunc);

  std::size_t correct = 0;
  for (std::size_t e = 0; e < n; ++e) {
    const EpisodeLosses losses = config.scenario.episode(e, best[e], config.T, config.d, cell);
    Rng rng(derive_seed(cell, Stream::kIdentify, e));
    const EpisodeResult r = run_episode(losses, inner, rng);
    if (r.est_best_arm == r.true_best_arm) ++correct;
  }
  return {static_cast<double>(correct) / static_cast<double>(n), params.one_minus_d_eps(), n};
}

namespace {

RegretReport run_cell_algorithm(const ExperimentConfig& config, const EpisodeStream& env,
                                Algorithm a, const std::optional<MetaParams>& params) {
  switch (a) {
    case Algorithm::kMetaInf:
      return run_meta_inf(env, *params, config.record_decisions);
    case Algorithm::kInfReset:
      return run_inf_reset(env);
    case Algorithm::kInfKnownPrior:
      return run_inf_known_prior(env, config.scenario.prior(config.d), config.known_prior_q);
    case Algorithm::kExp3:
      return run_exp3(env);
    case Algorithm::kExp3S:
      return run_exp3s(env, config.exp3s_mixing);
  }
  throw DomainError("unknown algorithm");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  if (std::find(config.algorithms.begin(), config.algorithms.end(), Algorithm::kMetaInf) !=
      config.algorithms.end()) {
    result.params = config.meta_params();
  }

  const std::size_t cells = config.seeds.size();
  const std::size_t per_cell = config.algorithms.size();
  result.reports.resize(cells * per_cell);
  std::vector<std::exception_ptr> errors(cells);

  auto run_cell = [&](std::size_t c) {
    try {
      const std::uint64_t seed = config.seeds[c];
      const EpisodeStream env(config.scenario, config.S, config.T, config.d,
                              config.cell_seed(seed));
      for (std::size_t k = 0; k < per_cell; ++k) {
        RegretReport r = run_cell_algorithm(config, env, config.algorithms[k], result.params);
        r.seed = seed;
        result.reports[c * per_cell + k] = std::move(r);
      }
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };

  const std::size_t workers = std::min(config.threads, cells);
  if (workers <= 1) {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < cells; c = next++) run_cell(c);
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return result;
}

std::vector<SummaryRow> summarize(const ExperimentConfig& config, const ExperimentResult& result) {
  std::vector<SummaryRow> rows;
  const std::size_t per_cell = config.algorithms.size();
  for (std::size_t k = 0; k < per_cell; ++k) {
    SummaryRow row;
    row.algorithm = std::string(to_string(config.algorithms[k]));
    std::vector<double> totals;
    double bound_sum = 0.0;
    std::size_t bound_count = 0;
    BoundBreakdown avg;
    bool have_breakdown = false;
    for (std::size_t i = k; i < result.reports.size(); i += per_cell) {
      const RegretReport& r = result.reports[i];
      totals.push_back(r.total_regret);
      if (r.bound) {
        have_breakdown = true;
        avg.u_expl += r.bound->u_expl;
        avg.u_lr_slope += r.bound->u_lr_slope;
        avg.u_lr_log += r.bound->u_lr_log;
        avg.u_lr += r.bound->u_lr;
        avg.u_init += r.bound->u_init;
        avg.u_psi += r.bound->u_psi;
        avg.entropy_term += r.bound->entropy_term;
        avg.v_star += r.bound->v_star;
        avg.bound_value += r.bound->bound_value;
        bound_sum += r.bound->bound_value;
        ++bound_count;
      } else if (r.reference_bound) {
        bound_sum += *r.reference_bound;
        ++bound_count;
      }
    }
    row.seeds = totals.size();
    double mean = 0.0;
    for (double t : totals) mean += t;
    mean /= static_cast<double>(totals.size());
    double var = 0.0;
    for (double t : totals) var += (t - mean) * (t - mean);
    row.mean_total_regret = mean;
    row.std_total_regret =
        totals.size() > 1 ? std::sqrt(var / static_cast<double>(totals.size() - 1)) : 0.0;
    if (bound_count > 0) row.bound_value = bound_sum / static_cast<double>(bound_count);
    if (have_breakdown) {
      const double n = static_cast<double>(bound_count);
      for (double* f : {&avg.u_expl, &avg.u_lr_slope, &avg.u_lr_log, &avg.u_lr, &avg.u_init,
                        &avg.u_psi, &avg.entropy_term, &avg.v_star, &avg.bound_value})
        *f /= n;
      row.bound = avg;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_episode_csv(std::ostream& out, const ExperimentResult& result) {
  out << "seed,episode,algorithm,eta,regret,cum_regret,true_best_arm,est_best_arm,identified\n";
  for (const RegretReport& r : result.reports) {
    double cum = 0.0;
    for (std::size_t s = 0; s < r.per_episode_regret.size(); ++s) {
      cum += r.per_episode_regret[s];
      out << r.seed << ',' << s + 1 << ',' << r.algorithm << ',' << format_number(r.chosen_eta[s])
          << ',' << format_number(r.per_episode_regret[s]) << ',' << format_number(cum) << ','
          << r.true_best_arm[s] << ',' << r.est_best_arm[s] << ','
          << static_cast<int>(r.identification_correct[s]) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "algorithm,mean_total_regret,std,bound_value,v_star,u_expl,u_lr,u_init,u_psi,"
         "entropy_term\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const SummaryRow& row : rows) {
    out << row.algorithm << ',' << format_number(row.mean_total_regret) << ','
        << format_number(row.std_total_regret) << ',' << opt(row.bound_value);
    if (row.bound) {
      const BoundBreakdown& b = *row.bound;
      out << ',' << format_number(b.v_star) << ',' << format_number(b.u_expl) << ','
          << format_number(b.u_lr) << ',' << format_number(b.u_init) << ','
          << format_number(b.u_psi) << ',' << format_number(b.entropy_term);
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  }
}

void write_decisions_csv(std::ostream& out, const ExperimentResult& result, std::size_t T,
                         std::size_t d) {
  out << "seed,algorithm,episode,round";
  for (std::size_t i = 0; i < d; ++i) out << ",x" << i;
  out << '\n';
  for (const RegretReport& r : result.reports) {
    const std::size_t rows = r.decisions.size() / d;
    for (std::size_t k = 0; k < rows; ++k) {
      out << r.seed << ',' << r.algorithm << ',' << k / T + 1 << ',' << k % T + 1;
      for (std::size_t i = 0; i < d; ++i) out << ',' << format_number(r.decisions[k * d + i]);
      out << '\n';
    }
  }
}

}  // namespace metainf
