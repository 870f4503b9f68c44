#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "metainf/cli.hpp"
#include "metainf/config.hpp"
#include "metainf/errors.hpp"

using namespace metainf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("metainf_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "experiment.toml";
  std::ofstream(p) << text;
  return p;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

const char* kMinimal = R"(
[experiment]
S = 2
T = 10
d = 2
algorithms = ["meta_inf"]

[scenario]
gap = 0.5

[params]
force = true
)";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parses sections, comments and arrays") {
  const ConfigTable t = parse_config_text(R"(
# leading comment
[experiment]
S = 20       # trailing comment
T = 1_000
seeds = [1, 2,
         3]
record_decisions = true
[scenario]
prior = "few_good_arms"
zeta = 5e-2
)");
  CHECK(t.at("experiment.S").integer == 20);
  CHECK(t.at("experiment.T").integer == 1000);
  CHECK(t.at("experiment.seeds").items.size() == 3);
  CHECK(t.at("experiment.record_decisions").boolean);
  CHECK(t.at("scenario.prior").text == "few_good_arms");
  CHECK(t.at("scenario.zeta").number == 0.05);
  const ExperimentConfig c = config_from_table(t);
  CHECK(c.S == 20);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(c.scenario.prior_kind == PriorKind::kFewGoodArms);
}

TEST_CASE("errors name the offending key") {
  auto key_of = [](const std::string& text) {
    try {
      config_from_table(parse_config_text(text));
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of("[experiment]\nbogus = 1\n") == "experiment.bogus");
  CHECK(key_of("[experiment]\nS = \"many\"\n") == "experiment.S");
  CHECK(key_of("[scenario]\ngap = 0.9\n") == "scenario.gap");
  CHECK(key_of("[experiment]\nd = 1\n") == "experiment.d");
  CHECK(key_of("[experiment]\nalgorithms = [\"ucb\"]\n") == "experiment.algorithms");
  CHECK(key_of("[scenario]\nprior = \"zipf\"\n") == "scenario.prior");
  CHECK(key_of("[experiment]\nS = 2\nS = 3\n") == "experiment.S");
}

TEST_CASE("overrides") {
  ConfigTable t = parse_config_text(kMinimal);
  apply_override(t, "seeds=1,2,3");
  apply_override(t, "scenario.gap=0.4");
  apply_override(t, "prior=uniform");
  apply_override(t, "c_delta=2");
  const ExperimentConfig c = config_from_table(t);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(c.scenario.gap == 0.4);
  CHECK(c.params.c_delta == 2.0);
  apply_override(t, "seeds=4..6");
  CHECK(config_from_table(t).seeds == std::vector<std::uint64_t>{4, 5, 6});
  CHECK_THROWS_AS(apply_override(t, "nonsense=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(t, "S"), ConfigError);
}

TEST_CASE("dumped defaults parse back to the same configuration") {
  ExperimentConfig c;
  c.S = 7;
  c.seeds = {3, 9};
  c.scenario.prior_kind = PriorKind::kFewGoodArms;
  c.scenario.k = 1;
  c.scenario.zeta = 0.3;
  c.params.alpha = 0.75;
  c.exp3s_mixing = 0.2;
  const std::string text = dump_config(c);
  const ExperimentConfig back = config_from_table(parse_config_text(text));
  CHECK(dump_config(back) == text);
  CHECK(back.params.alpha == 0.75);
  CHECK(*back.scenario.noise_amp == c.scenario.gap_settings().noise_amp);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_config("/nonexistent/metainf.toml"), ConfigError);
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("missing config file exits 2 and names the path") {
  const CliRun r = cli({"run", "--config", "/nonexistent/abc.toml"});
  CHECK(r.code == 2);
  CHECK(r.err.find("/nonexistent/abc.toml") != std::string::npos);
}

TEST_CASE("bad flags exit 2") {
  CHECK(cli({"launch", "--config", "x"}).code == 2);
  CHECK(cli({"run"}).code == 2);
}

TEST_CASE("minimal run writes both CSVs") {
  const fs::path dir = scratch("minimal");
  const fs::path cfg = write_file(dir, kMinimal);
  const CliRun r = cli({"run", "--config", cfg.string(), "--out", (dir / "out").string()});
  CHECK(r.code == 0);
  CHECK(count_lines(dir / "out" / "episodes.csv") == 1 + 2 * 1);
  CHECK(count_lines(dir / "out" / "summary.csv") == 1 + 1);
}

TEST_CASE("seed override aggregates three seeds") {
  const fs::path dir = scratch("seeds");
  const fs::path cfg = write_file(dir, kMinimal);
  const CliRun r = cli({"run", "--config", cfg.string(), "--out", (dir / "out").string(),
                        "--override", "seeds=1,2,3"});
  CHECK(r.code == 0);
  CHECK(count_lines(dir / "out" / "episodes.csv") == 1 + 2 * 3);
  std::ifstream in(dir / "out" / "summary.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(row.rfind("meta_inf,", 0) == 0);
  CHECK(r.out.find("meta_inf                3") != std::string::npos);
}

TEST_CASE("config errors exit 2 with the key") {
  const fs::path dir = scratch("badkey");
  const fs::path cfg = write_file(dir, "[experiment]\nS = -4\n");
  const CliRun r = cli({"run", "--config", cfg.string(), "--out", (dir / "out").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("experiment.S") != std::string::npos);
}

TEST_CASE("validate feasible configuration") {
  const fs::path dir = scratch("valid");
  const fs::path cfg = write_file(dir, R"(
[experiment]
S = 10
T = 11200
d = 4
[scenario]
gap = 0.5
[params]
delta = 0.02
)");
  const CliRun r = cli({"validate", "--config", cfg.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("identification interval [0.00924196, 0.25]") != std::string::npos);
  CHECK(r.out.find("delta 0.02") != std::string::npos);
  CHECK(r.out.find("eps_delta 0.00247875") != std::string::npos);
  CHECK(r.out.find("minimal feasible T") != std::string::npos);
  CHECK(r.out.find("[params]") != std::string::npos);  // defaults are printed
}

TEST_CASE("validate infeasible horizon") {
  const fs::path dir = scratch("short");
  const fs::path cfg = write_file(dir, "[experiment]\nT = 10\nd = 4\n[scenario]\ngap = 0.1\n");
  const CliRun r = cli({"validate", "--config", cfg.string()});
  CHECK(r.code == 1);
  // ceil(56 ln4 * 4 / (3 * 0.01)) = ceil(10350.998)
  CHECK(r.out.find("minimal feasible T 10351") != std::string::npos);
}

TEST_CASE("validate rejects delta above 1/d") {
  const fs::path dir = scratch("bigdelta");
  const fs::path cfg =
      write_file(dir, "[experiment]\nT = 11200\nd = 4\n[scenario]\ngap = 0.5\n[params]\ndelta = 0.3\n");
  CHECK(cli({"validate", "--config", cfg.string()}).code == 1);
}

TEST_CASE("other verbs") {
  const fs::path dir = scratch("verbs");
  const fs::path cfg = write_file(dir, R"(
[experiment]
S = 4
T = 1200
d = 2
seeds = [1, 2]
identify_episodes = 20
[scenario]
gap = 0.5
)");
  const std::string out = (dir / "out").string();
  CHECK(cli({"bound", "--config", cfg.string(), "--out", out}).code == 0);
  CHECK(count_lines(dir / "out" / "bound.csv") == 3);
  const CliRun id = cli({"identify", "--config", cfg.string()});
  CHECK(id.code == 0);
  CHECK(id.out.find("identification rate") != std::string::npos);
  const CliRun cmp = cli({"compare", "--config", cfg.string(), "--out", out, "--threads", "2"});
  CHECK(cmp.code == 0);
  CHECK(count_lines(dir / "out" / "summary.csv") == 1 + 5);
  CHECK(cli({"run", "--config", cfg.string(), "--out", out, "--record-decisions"}).code == 0);
  CHECK(count_lines(dir / "out" / "decisions.csv") == 1 + 2 * 4 * 1200);
}

TEST_CASE("MB_SEED overrides the master seed") {
  const fs::path dir = scratch("env");
  const fs::path cfg = write_file(dir, kMinimal);
  ::setenv("MB_SEED", "1234", 1);
  const ExperimentConfig c = load_config(cfg);
  ::setenv("MB_SEED", "abc", 1);
  CHECK_THROWS_AS(load_config(cfg), ConfigError);
  ::unsetenv("MB_SEED");
  CHECK(c.master_seed == 1234);
  CHECK(load_config(cfg).master_seed == 0);
}

}  // TEST_SUITE
