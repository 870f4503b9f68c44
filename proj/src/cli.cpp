#include "metainf/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <vector>

#include "metainf/config.hpp"
#include "metainf/errors.hpp"
#include "metainf/harness.hpp"

namespace metainf {

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::size_t threads = 0;  // 0: keep the config value
  bool record_decisions = false;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig load(const Options& o) {
  ExperimentConfig c = load_config(o.config_path, o.overrides);
  if (o.threads > 0) c.threads = o.threads;
  if (o.record_decisions) c.record_decisions = true;
  return c;
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::ofstream f(dir / name);
  if (!f) throw IoError("cannot write " + (dir / name).string());
  return f;
}

void print_summary(std::ostream& out, std::span<const SummaryRow> rows) {
  out << std::left << std::setw(18) << "algorithm" << std::right << std::setw(7) << "seeds"
      << std::setw(16) << "mean_regret" << std::setw(14) << "std" << std::setw(16) << "bound"
      << '\n';
  for (const SummaryRow& r : rows) {
    out << std::left << std::setw(18) << r.algorithm << std::right << std::setw(7) << r.seeds
        << std::setw(16) << std::setprecision(8) << r.mean_total_regret << std::setw(14)
        << r.std_total_regret << std::setw(16);
    if (r.bound_value) out << *r.bound_value;
    else out << "-";
    out << '\n';
  }
}

void write_outputs(const Options& o, const ExperimentConfig& c, const ExperimentResult& result,
                   std::span<const SummaryRow> rows, std::ostream& out) {
  const std::filesystem::path dir(o.out_dir);
  {
    auto f = open_output(dir, "episodes.csv");
    write_episode_csv(f, result);
  }
  {
    auto f = open_output(dir, "summary.csv");
    write_summary_csv(f, rows);
  }
  if (c.record_decisions) {
    auto f = open_output(dir, "decisions.csv");
    write_decisions_csv(f, result, c.T, c.d);
  }
  out << "wrote " << (dir / "episodes.csv").string() << " and " << (dir / "summary.csv").string()
      << '\n';
}

int cmd_run(const Options& o, std::ostream& out) {
  const ExperimentConfig c = load(o);
  const ExperimentResult result = run_experiment(c);
  if (result.params && result.params->assumption_violated)
    out << "warning: delta lies outside the identification interval (forced)\n";
  const auto rows = summarize(c, result);
  print_summary(out, rows);
  write_outputs(o, c, result, rows, out);
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
  ExperimentConfig c = load(o);
  c.algorithms = {Algorithm::kMetaInf, Algorithm::kInfReset, Algorithm::kInfKnownPrior,
                  Algorithm::kExp3, Algorithm::kExp3S};
  const ExperimentResult result = run_experiment(c);
  const auto rows = summarize(c, result);
  print_summary(out, rows);

  // Mean per-episode regret over the last quarter of the episodes.
  const std::size_t first = c.S - std::max<std::size_t>(1, c.S / 4);
  out << "mean per-episode regret, episodes " << first + 1 << ".." << c.S << ":\n";
  const std::size_t per_cell = c.algorithms.size();
  for (std::size_t k = 0; k < per_cell; ++k) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = k; i < result.reports.size(); i += per_cell) {
      const auto& r = result.reports[i].per_episode_regret;
      for (std::size_t s = first; s < r.size(); ++s, ++n) sum += r[s];
    }
    out << "  " << std::left << std::setw(18) << to_string(c.algorithms[k]) << std::right
        << std::setprecision(8) << sum / static_cast<double>(n) << '\n';
  }
  write_outputs(o, c, result, rows, out);
  return kExitOk;
}

int cmd_bound(const Options& o, std::ostream& out) {
  const ExperimentConfig c = load(o);
  const MetaParams p = c.meta_params();
  auto f = open_output(o.out_dir, "bound.csv");
  f << "seed,v_star,bound_value,u_expl,u_lr,u_init,u_psi,entropy_term\n";
  out << "delta " << p.delta << "  alpha " << p.alpha << "  D " << p.big_d << "  gamma "
      << p.gamma << "  sigma " << p.sigma << "  eps " << p.eps_delta << '\n';
  for (std::uint64_t seed : c.seeds) {
    const auto best = c.scenario.best_arms(c.S, c.d, c.cell_seed(seed));
    const Distribution psi = empirical_best_arm_distribution(best, c.d);
    const BoundBreakdown b = regret_bound(psi, p, c.S);
    f << seed << ',' << format_number(b.v_star) << ',' << format_number(b.bound_value) << ','
      << format_number(b.u_expl) << ',' << format_number(b.u_lr) << ','
      << format_number(b.u_init) << ',' << format_number(b.u_psi) << ','
      << format_number(b.entropy_term) << '\n';
    out << "seed " << seed << ": bound " << std::setprecision(10) << b.bound_value << " at v* "
        << b.v_star << " (H(psi) S = " << b.entropy_term << ")\n";
  }
  return kExitOk;
}

int cmd_identify(const Options& o, std::ostream& out) {
  const ExperimentConfig c = load(o);
  const IdentificationResult r = identification_experiment(c);
  out << "episodes " << r.episodes << "  identification rate " << std::setprecision(6)
      << r.empirical_rate << "  floor (1 - d eps) " << r.identification_floor << '\n';
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const ExperimentConfig c = load(o);
  out << dump_config(c) << '\n';
  out << std::setprecision(6);
  if (!c.gap_known) {
    out << "gap not supplied to the parameter formulas: eps_delta = 0\n";
  } else {
    const DeltaInterval iv = identification_interval(c.scenario.gap, c.T, c.d);
    out << "identification interval [" << iv.lower << ", " << iv.upper << "]"
        << (iv.feasible() ? "" : " (empty)") << '\n';
    out << "minimal feasible T " << std::ceil(minimal_feasible_T(c.scenario.gap, c.d)) << '\n';
  }
  try {
    const MetaParams p = c.meta_params();
    out << "delta " << p.delta << '\n';
    out << "eps_delta " << p.eps_delta << '\n';
    out << "1 - d eps " << p.one_minus_d_eps() << '\n';
    out << "alpha " << p.alpha << "  D " << p.big_d << "  gamma " << p.gamma << "  sigma "
        << p.sigma << '\n';
    if (p.assumption_violated) {
      out << "infeasible: delta forced outside the identification interval\n";
      return kExitInfeasible;
    }
  } catch (const InfeasibleParamsError& e) {
    out << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  }
  out << "feasible\n";
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Meta-INF bandit experiments", "metabandit"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "experiment file")->required();
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--override", o.overrides, "KEY=VALUE, repeatable")->allow_extra_args(false);
    sub->add_option("--threads", o.threads, "worker threads over seeds");
    sub->add_flag("--record-decisions", o.record_decisions, "write per-round distributions");
  };
  auto* run = app.add_subcommand("run", "run the configured algorithms");
  auto* bound = app.add_subcommand("bound", "evaluate the total-regret bound");
  auto* identify = app.add_subcommand("identify", "best-arm identification experiment");
  auto* compare = app.add_subcommand("compare", "run Meta-INF against every baseline");
  auto* validate = app.add_subcommand("validate", "print the configuration and check feasibility");
  for (auto* sub : {run, bound, identify, compare, validate}) add_common(sub);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(o, out);
    if (bound->parsed()) return cmd_bound(o, out);
    if (identify->parsed()) return cmd_identify(o, out);
    if (compare->parsed()) return cmd_compare(o, out);
    return cmd_validate(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleParamsError& e) {
    err << "infeasible parameters: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << " (residual " << e.residual() << ")";
    if (e.episode) err << " episode " << *e.episode;
    if (e.round) err << " round " << *e.round;
    err << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    err << "output error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace metainf
