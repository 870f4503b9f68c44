#include "metainf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "metainf/errors.hpp"

namespace metainf {

namespace {

using Kind = ConfigValue::Kind;

// Expected value kind of every recognised key. kFloat also accepts integers.
const std::map<std::string, Kind>& known_keys() {
  static const std::map<std::string, Kind> keys = {
      {"experiment.S", Kind::kInteger},
      {"experiment.T", Kind::kInteger},
      {"experiment.d", Kind::kInteger},
      {"experiment.algorithms", Kind::kArray},
      {"experiment.seeds", Kind::kArray},
      {"experiment.master_seed", Kind::kInteger},
      {"experiment.threads", Kind::kInteger},
      {"experiment.identify_episodes", Kind::kInteger},
      {"experiment.record_decisions", Kind::kBool},
      {"scenario.prior", Kind::kString},
      {"scenario.k", Kind::kInteger},
      {"scenario.zeta", Kind::kFloat},
      {"scenario.sequence", Kind::kArray},
      {"scenario.gap", Kind::kFloat},
      {"scenario.base_loss", Kind::kFloat},
      {"scenario.noise", Kind::kFloat},
      {"scenario.gap_known", Kind::kBool},
      {"params.delta", Kind::kFloat},
      {"params.alpha", Kind::kFloat},
      {"params.c_delta", Kind::kFloat},
      {"params.c_alpha", Kind::kFloat},
      {"params.force", Kind::kBool},
      {"baselines.known_prior_q", Kind::kFloat},
      {"baselines.exp3s_mixing", Kind::kFloat},
  };
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Drops a trailing # comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

class ValueParser {
 public:
  ValueParser(std::string_view text, const std::string& key) : s_(text), key_(key) {}

  ConfigValue parse_all() {
    ConfigValue v = parse();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(key_, what + " in '" + std::string(s_) + "'");
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
                                s_[pos_] == '\r'))
      ++pos_;
  }

  ConfigValue parse() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    return parse_scalar();
  }

  ConfigValue parse_string() {
    ConfigValue v;
    v.kind = Kind::kString;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      v.text.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return v;
  }

  ConfigValue parse_array() {
    ConfigValue v;
    v.kind = Kind::kArray;
    ++pos_;
    for (;;) {
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      ConfigValue item = parse();
      if (item.kind == Kind::kArray) fail("nested arrays are not supported");
      v.items.push_back(std::move(item));
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
      else if (pos_ < s_.size() && s_[pos_] != ']') fail("expected ',' or ']'");
    }
  }

  ConfigValue parse_scalar() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != ' ' &&
           s_[pos_] != '\t' && s_[pos_] != '\n' && s_[pos_] != '\r')
      ++pos_;
    std::string tok(s_.substr(start, pos_ - start));
    ConfigValue v;
    if (tok == "true" || tok == "false") {
      v.kind = Kind::kBool;
      v.boolean = tok == "true";
      return v;
    }
    tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
    if (tok.empty()) fail("missing value");
    const char* b = tok.data();
    const char* e = tok.data() + tok.size();
    const char* digits = (*b == '+') ? b + 1 : b;
    std::int64_t i = 0;
    if (auto r = std::from_chars(digits, e, i); r.ec == std::errc() && r.ptr == e) {
      v.kind = Kind::kInteger;
      v.integer = i;
      v.number = static_cast<double>(i);
      return v;
    }
    double x = 0.0;
    if (auto r = std::from_chars(digits, e, x); r.ec == std::errc() && r.ptr == e) {
      v.kind = Kind::kFloat;
      v.number = x;
      return v;
    }
    fail("cannot parse value '" + tok + "'");
  }

  std::string_view s_;
  const std::string& key_;
  std::size_t pos_ = 0;
};

int bracket_balance(std::string_view s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (in_string && s[i] == '\\') ++i;
    else if (s[i] == '"') in_string = !in_string;
    else if (!in_string && s[i] == '[') ++depth;
    else if (!in_string && s[i] == ']') --depth;
  }
  return depth;
}

std::string resolve_key(std::string_view key) {
  const std::string k(trim(key));
  if (known_keys().count(k)) return k;
  if (k.find('.') == std::string::npos) {
    std::string found;
    for (const auto& [full, kind] : known_keys()) {
      if (full.substr(full.find('.') + 1) == k) {
        if (!found.empty()) throw ConfigError(k, "ambiguous key; qualify it with a section");
        found = full;
      }
    }
    if (!found.empty()) return found;
  }
  throw ConfigError(k, "unknown key");
}

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::kString: return "a string";
    case Kind::kInteger: return "an integer";
    case Kind::kFloat: return "a number";
    case Kind::kBool: return "a boolean";
    case Kind::kArray: return "an array";
  }
  return "a value";
}

const ConfigValue* find(const ConfigTable& t, const std::string& key, Kind expected) {
  const auto it = t.find(key);
  if (it == t.end()) return nullptr;
  const ConfigValue& v = it->second;
  const bool ok = v.kind == expected || (expected == Kind::kFloat && v.kind == Kind::kInteger);
  if (!ok) throw ConfigError(key, "expected " + kind_name(expected));
  return &v;
}

std::size_t as_count(const ConfigValue& v, const std::string& key) {
  if (v.kind != Kind::kInteger) throw ConfigError(key, "expected an integer");
  if (v.integer < 0) throw ConfigError(key, "must be non-negative");
  return static_cast<std::size_t>(v.integer);
}

// "a..b" inclusive.
std::vector<std::uint64_t> parse_seed_range(const std::string& text, const std::string& key) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw ConfigError(key, "expected a seed range 'a..b'");
  std::uint64_t a = 0, b = 0;
  const std::string lo = text.substr(0, dots), hi = text.substr(dots + 2);
  if (std::from_chars(lo.data(), lo.data() + lo.size(), a).ec != std::errc() ||
      std::from_chars(hi.data(), hi.data() + hi.size(), b).ec != std::errc() || b < a)
    throw ConfigError(key, "bad seed range '" + text + "'");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
  return seeds;
}

std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

ConfigValue parse_config_value(std::string_view text, const std::string& key) {
  return ValueParser(trim(text), key).parse_all();
}

ConfigTable parse_config_text(std::string_view text, std::string_view source) {
  ConfigTable table;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto where = [&] { return std::string(source) + ":" + std::to_string(lineno); };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where(), "malformed section header");
      section = std::string(trim(body.substr(1, body.size() - 2)));
      if (section.empty()) throw ConfigError(where(), "empty section name");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where(), "expected key = value");
    const std::string name(trim(body.substr(0, eq)));
    if (name.empty()) throw ConfigError(where(), "missing key");
    std::string value(trim(body.substr(eq + 1)));
    // Arrays may span lines.
    while (bracket_balance(value) > 0 && std::getline(in, line)) {
      ++lineno;
      value += ' ';
      value += trim(strip_comment(line));
    }
    const std::string key = section.empty() ? name : section + "." + name;
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key (" + where() + ")");
    if (table.count(key)) throw ConfigError(key, "duplicate key (" + where() + ")");
    table[key] = parse_config_value(value, key);
  }
  return table;
}

void apply_override(ConfigTable& table, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(std::string(assignment), "override must look like KEY=VALUE");
  const std::string key = resolve_key(assignment.substr(0, eq));
  std::string value(trim(assignment.substr(eq + 1)));
  const Kind expected = known_keys().at(key);
  if (expected == Kind::kArray && !value.empty() && value.front() != '[') {
    if (key == "experiment.seeds" && value.find("..") != std::string::npos)
      value = "\"" + value + "\"";
    else
      value = "[" + value + "]";
  } else if (expected == Kind::kString && !value.empty() && value.front() != '"') {
    value = "\"" + value + "\"";
  }
  table[key] = parse_config_value(value, key);
}

ExperimentConfig config_from_table(const ConfigTable& table) {
  for (const auto& [key, value] : table)
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key");

  ExperimentConfig c;
  if (auto* v = find(table, "experiment.S", Kind::kInteger)) c.S = as_count(*v, "experiment.S");
  if (auto* v = find(table, "experiment.T", Kind::kInteger)) c.T = as_count(*v, "experiment.T");
  if (auto* v = find(table, "experiment.d", Kind::kInteger)) c.d = as_count(*v, "experiment.d");
  if (auto* v = find(table, "experiment.algorithms", Kind::kArray)) {
    c.algorithms.clear();
    for (const ConfigValue& item : v->items) {
      if (item.kind != Kind::kString)
        throw ConfigError("experiment.algorithms", "expected algorithm names");
      try {
        c.algorithms.push_back(parse_algorithm(item.text));
      } catch (const DomainError& e) {
        throw ConfigError("experiment.algorithms", e.what());
      }
    }
  }
  if (const auto it = table.find("experiment.seeds"); it != table.end()) {
    const ConfigValue& v = it->second;
    if (v.kind == Kind::kString) {
      c.seeds = parse_seed_range(v.text, "experiment.seeds");
    } else if (v.kind == Kind::kArray) {
      c.seeds.clear();
      for (const ConfigValue& item : v.items)
        c.seeds.push_back(as_count(item, "experiment.seeds"));
    } else {
      throw ConfigError("experiment.seeds", "expected an array of seeds or a range 'a..b'");
    }
  }
  if (auto* v = find(table, "experiment.master_seed", Kind::kInteger))
    c.master_seed = as_count(*v, "experiment.master_seed");
  if (auto* v = find(table, "experiment.threads", Kind::kInteger))
    c.threads = as_count(*v, "experiment.threads");
  if (auto* v = find(table, "experiment.identify_episodes", Kind::kInteger))
    c.identify_episodes = as_count(*v, "experiment.identify_episodes");
  if (auto* v = find(table, "experiment.record_decisions", Kind::kBool))
    c.record_decisions = v->boolean;

  if (auto* v = find(table, "scenario.prior", Kind::kString)) {
    if (v->text == "uniform") c.scenario.prior_kind = PriorKind::kUniform;
    else if (v->text == "few_good_arms") c.scenario.prior_kind = PriorKind::kFewGoodArms;
    else if (v->text == "fixed") c.scenario.prior_kind = PriorKind::kFixedSequence;
    else throw ConfigError("scenario.prior", "expected uniform, few_good_arms or fixed");
  }
  if (auto* v = find(table, "scenario.k", Kind::kInteger)) c.scenario.k = as_count(*v, "scenario.k");
  if (auto* v = find(table, "scenario.zeta", Kind::kFloat)) c.scenario.zeta = v->number;
  if (auto* v = find(table, "scenario.sequence", Kind::kArray)) {
    for (const ConfigValue& item : v->items)
      c.scenario.fixed_sequence.push_back(as_count(item, "scenario.sequence"));
  }
  if (auto* v = find(table, "scenario.gap", Kind::kFloat)) c.scenario.gap = v->number;
  if (auto* v = find(table, "scenario.base_loss", Kind::kFloat)) c.scenario.base_loss = v->number;
  if (auto* v = find(table, "scenario.noise", Kind::kFloat)) c.scenario.noise_amp = v->number;
  if (auto* v = find(table, "scenario.gap_known", Kind::kBool)) c.gap_known = v->boolean;

  if (auto* v = find(table, "params.delta", Kind::kFloat)) c.params.delta = v->number;
  if (auto* v = find(table, "params.alpha", Kind::kFloat)) c.params.alpha = v->number;
  if (auto* v = find(table, "params.c_delta", Kind::kFloat)) c.params.c_delta = v->number;
  if (auto* v = find(table, "params.c_alpha", Kind::kFloat)) c.params.c_alpha = v->number;
  if (auto* v = find(table, "params.force", Kind::kBool)) c.params.force = v->boolean;
  if (!(c.params.c_delta > 0.0)) throw ConfigError("params.c_delta", "must be positive");
  if (!(c.params.c_alpha > 0.0)) throw ConfigError("params.c_alpha", "must be positive");
  if (c.params.alpha && !(*c.params.alpha > 0.0))
    throw ConfigError("params.alpha", "must be positive");
  if (c.params.delta && !(*c.params.delta > 0.0))
    throw ConfigError("params.delta", "must be positive");

  if (auto* v = find(table, "baselines.known_prior_q", Kind::kFloat)) c.known_prior_q = v->number;
  if (auto* v = find(table, "baselines.exp3s_mixing", Kind::kFloat)) {
    if (!(v->number > 0.0 && v->number <= 1.0))
      throw ConfigError("baselines.exp3s_mixing", "must lie in (0,1]");
    c.exp3s_mixing = v->number;
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot read config file");
  std::stringstream buf;
  buf << in.rdbuf();
  ConfigTable table = parse_config_text(buf.str(), path.string());
  for (const std::string& o : overrides) apply_override(table, o);
  if (const char* env = std::getenv("MB_SEED"); env != nullptr && *env != '\0') {
    ConfigValue v;
    const std::string s(env);
    std::uint64_t seed = 0;
    if (auto r = std::from_chars(s.data(), s.data() + s.size(), seed);
        r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw ConfigError("MB_SEED", "expected a non-negative integer, got '" + s + "'");
    v.kind = Kind::kInteger;
    v.integer = static_cast<std::int64_t>(seed);
    v.number = static_cast<double>(seed);
    table["experiment.master_seed"] = v;
  }
  return config_from_table(table);
}

std::string dump_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "S = " << c.S << "\n";
  out << "T = " << c.T << "\n";
  out << "d = " << c.d << "\n";
  out << "algorithms = [";
  for (std::size_t i = 0; i < c.algorithms.size(); ++i)
    out << (i ? ", " : "") << '"' << to_string(c.algorithms[i]) << '"';
  out << "]\n";
  out << "seeds = [";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) out << (i ? ", " : "") << c.seeds[i];
  out << "]\n";
  out << "master_seed = " << c.master_seed << "\n";
  out << "threads = " << c.threads << "\n";
  out << "identify_episodes = " << c.identify_episodes << "\n";
  out << "record_decisions = " << (c.record_decisions ? "true" : "false") << "\n";

  const Scenario& s = c.scenario;
  out << "\n[scenario]\n";
  switch (s.prior_kind) {
    case PriorKind::kUniform: out << "prior = \"uniform\"\n"; break;
    case PriorKind::kFewGoodArms: out << "prior = \"few_good_arms\"\n"; break;
    case PriorKind::kFixedSequence: out << "prior = \"fixed\"\n"; break;
  }
  out << "k = " << s.k << "\n";
  out << "zeta = " << fmt(s.zeta) << "\n";
  out << "sequence = [";
  for (std::size_t i = 0; i < s.fixed_sequence.size(); ++i)
    out << (i ? ", " : "") << s.fixed_sequence[i];
  out << "]\n";
  out << "gap = " << fmt(s.gap) << "\n";
  out << "base_loss = " << fmt(s.base_loss) << "\n";
  out << "noise = " << fmt(s.gap_settings().noise_amp) << "\n";
  out << "gap_known = " << (c.gap_known ? "true" : "false") << "\n";

  out << "\n[params]\n";
  if (c.params.delta) out << "delta = " << fmt(*c.params.delta) << "\n";
  else out << "# delta = (formula, clamped into the identification interval)\n";
  if (c.params.alpha) out << "alpha = " << fmt(*c.params.alpha) << "\n";
  else out << "# alpha = (formula)\n";
  out << "c_delta = " << fmt(c.params.c_delta) << "\n";
  out << "c_alpha = " << fmt(c.params.c_alpha) << "\n";
  out << "force = " << (c.params.force ? "true" : "false") << "\n";

  out << "\n[baselines]\n";
  out << "known_prior_q = " << fmt(c.known_prior_q) << "\n";
  if (c.exp3s_mixing) out << "exp3s_mixing = " << fmt(*c.exp3s_mixing) << "\n";
  else out << "# exp3s_mixing = (sqrt(d (S ln(d S T) + e) / ((e - 1) S T)), capped at 1)\n";
  return out.str();
}

}  // namespace metainf
