#include "cara/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "cara/errors.hpp"

namespace cara {

namespace {

std::string at_line(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.line < 0) return "";
  return " (line " + std::to_string(mark.line + 1) + ")";
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  throw ConfigError(message + at_line(node));
}

void require_map(const YAML::Node& node, const std::string& where) {
  if (!node.IsMap()) fail(node, where + " must be a mapping");
}

void check_keys(const YAML::Node& node, std::initializer_list<const char*> allowed,
                const std::string& where) {
  require_map(node, where);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

// Returned by value: assigning to an already-bound YAML::Node rewrites the tree.
YAML::Node required(const YAML::Node& parent, const char* key, const std::string& where) {
  YAML::Node v = parent[key];
  if (!v) fail(parent, "missing key '" + std::string(key) + "' in " + where);
  return v;
}

double as_real(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(node, what + " must be a number");
  const std::string s = node.Scalar();
  if (s == "inf" || s == "+inf" || s == "infinity" || s == ".inf" || s == "Inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (s == "-inf" || s == "-.inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(node, what + " must be a number, got '" + s + "'");
  }
}

std::uint64_t as_count(const YAML::Node& node, const std::string& what) {
  const double v = as_real(node, what);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) {
    fail(node, what + " must be a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

bool as_bool(const YAML::Node& node, const std::string& what) {
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    fail(node, what + " must be true or false");
  }
}

std::string as_string(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(node, what + " must be a string");
  return node.Scalar();
}

double real_or(const YAML::Node& parent, const char* key, double fallback, const std::string& where) {
  const YAML::Node v = parent[key];
  return v ? as_real(v, where + "." + key) : fallback;
}

std::vector<double> as_reals(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence()) fail(node, what + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : node) out.push_back(as_real(x, what));
  return out;
}

OutcomeDist parse_dist(const YAML::Node& node, const std::string& where) {
  require_map(node, where);
  const std::string kind = as_string(required(node, "dist", where), where + ".dist");
  if (kind == "noncentral_t") {
    check_keys(node, {"dist", "scale", "shift", "df", "ncp"}, where);
    return NoncentralT{real_or(node, "scale", 1.0, where), real_or(node, "shift", 0.0, where),
                       as_real(required(node, "df", where), where + ".df"),
                       real_or(node, "ncp", 0.0, where)};
  }
  if (kind == "bernoulli") {
    check_keys(node, {"dist", "p"}, where);
    return Bernoulli{as_real(required(node, "p", where), where + ".p")};
  }
  if (kind == "point_mass") {
    check_keys(node, {"dist", "value"}, where);
    return PointMass{as_real(required(node, "value", where), where + ".value")};
  }
  fail(node, "unknown distribution '" + kind + "' in " + where +
                 " (expected noncentral_t, bernoulli or point_mass)");
}

PopulationSpec population_from(const YAML::Node& node) {
  const std::string where = "population";
  check_keys(node, {"strata_probs", "strata_weights", "strata"}, where);
  const YAML::Node strata = required(node, "strata", where);
  if (!strata.IsSequence() || strata.size() == 0) fail(strata, "population.strata must be a non-empty list");
  std::vector<PopulationSpec::ArmPair> outcomes;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const std::string w = "population.strata[" + std::to_string(i + 1) + "]";
    check_keys(strata[i], {"arm0", "arm1"}, w);
    outcomes.push_back({parse_dist(required(strata[i], "arm0", w), w + ".arm0"),
                        parse_dist(required(strata[i], "arm1", w), w + ".arm1")});
  }
  std::vector<double> probs;
  if (node["strata_probs"] && node["strata_weights"]) {
    fail(node, "give either strata_probs or strata_weights, not both");
  }
  if (node["strata_probs"]) {
    probs = as_reals(node["strata_probs"], "population.strata_probs");
  } else if (node["strata_weights"]) {
    probs = as_reals(node["strata_weights"], "population.strata_weights");
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (!(total > 0.0)) fail(node["strata_weights"], "strata_weights must have a positive sum");
    for (double& p : probs) p /= total;
  } else {
    probs.assign(outcomes.size(), 1.0 / static_cast<double>(outcomes.size()));
  }
  if (probs.size() != outcomes.size()) {
    fail(node, "population has " + std::to_string(outcomes.size()) + " strata but " +
                   std::to_string(probs.size()) + " probabilities");
  }
  try {
    PopulationSpec pop(std::move(probs), std::move(outcomes));
    for (std::uint32_t x = 0; x < pop.num_strata(); ++x) stratum_moments(pop, StratumId{x});
    return pop;
  } catch (const DomainError& e) {
    fail(node, std::string("invalid population: ") + e.what());
  }
}

AllocationTargetSpec target_from(const YAML::Node& node, const std::string& where) {
  require_map(node, where);
  const std::string rule = as_string(required(node, "rule", where), where + ".rule");
  AllocationTargetSpec spec;
  spec.clip_eps = real_or(node, "clip_eps", kDefaultClipEps, where);
  if (rule == "neyman") {
    check_keys(node, {"rule", "clip_eps"}, where);
    spec.rule = NeymanRule{};
  } else if (rule == "rsihr") {
    check_keys(node, {"rule", "clip_eps"}, where);
    spec.rule = RsihrRule{};
  } else if (rule == "bandbis") {
    check_keys(node, {"rule", "T", "clip_eps"}, where);
    spec.rule = BandBisRule{real_or(node, "T", 30.0, where)};
  } else if (rule == "optimal" || rule == "constrained_optimal") {
    check_keys(node, {"rule", "c", "clip_eps"}, where);
    spec.rule = ConstrainedOptimalRule{real_or(node, "c", kInf, where)};
  } else if (rule == "fixed") {
    check_keys(node, {"rule", "rho", "clip_eps"}, where);
    spec.rule = FixedRule{as_real(required(node, "rho", where), where + ".rho")};
  } else {
    fail(node, "unknown target rule '" + rule + "' in " + where +
                   " (expected neyman, rsihr, bandbis, optimal or fixed)");
  }
  try {
    validate(spec);
  } catch (const DomainError& e) {
    fail(node, where + ": " + e.what());
  }
  return spec;
}

RandomizerSpec randomizer_from(const YAML::Node& node, const std::string& where) {
  require_map(node, where);
  const std::string kind = as_string(required(node, "kind", where), where + ".kind");
  RandomizerSpec spec;
  if (kind == "complete") {
    check_keys(node, {"kind", "p"}, where);
    spec = CompleteRandomization{real_or(node, "p", 0.5, where)};
  } else if (kind == "permuted_block") {
    check_keys(node, {"kind", "block_size"}, where);
    const YAML::Node b = node["block_size"];
    spec = PermutedBlock{b ? static_cast<std::uint32_t>(as_count(b, where + ".block_size")) : 4u};
  } else if (kind == "efron") {
    check_keys(node, {"kind", "p"}, where);
    spec = EfronBcd{real_or(node, "p", 0.75, where)};
  } else if (kind == "minimization") {
    check_keys(node, {"kind", "p", "weights"}, where);
    Minimization m{real_or(node, "p", 0.75, where), {1.0}};
    if (node["weights"]) m.weights = as_reals(node["weights"], where + ".weights");
    spec = m;
  } else if (kind == "stratified_dbcd" || kind == "cadbcd") {
    check_keys(node, {"kind", "gamma", "n0", "target"}, where);
    const double gamma = real_or(node, "gamma", 2.0, where);
    const YAML::Node n0_node = node["n0"];
    const auto n0 = n0_node ? static_cast<std::uint32_t>(as_count(n0_node, where + ".n0")) : 10u;
    const AllocationTargetSpec target =
        target_from(required(node, "target", where), where + ".target");
    if (kind == "cadbcd") {
      spec = Cadbcd{gamma, n0, target};
    } else {
      spec = StratifiedDbcd{gamma, n0, target};
    }
  } else {
    fail(node, "unknown randomizer kind '" + kind + "' in " + where +
                   " (expected complete, permuted_block, efron, minimization, stratified_dbcd or cadbcd)");
  }
  try {
    validate(spec);
  } catch (const DomainError& e) {
    fail(node, where + ": " + e.what());
  }
  return spec;
}

std::vector<Estimator> estimators_from(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence() || node.size() == 0) fail(node, where + " must be a non-empty list");
  std::vector<Estimator> out;
  for (const auto& e : node) {
    const std::string name = as_string(e, where);
    if (name == "dim") {
      out.push_back(Estimator::dim);
    } else if (name == "sdim") {
      out.push_back(Estimator::sdim);
    } else {
      fail(e, "unknown estimator '" + name + "' (expected dim or sdim)");
    }
  }
  return out;
}

double default_constraint(const RandomizerSpec& spec) {
  const AllocationTargetSpec target = implied_target(spec);
  if (const auto* r = std::get_if<ConstrainedOptimalRule>(&target.rule)) return r->c;
  return kInf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  return parts;
}

bool is_index(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

// Applies "dotted.key=value". A bare key names an entry of `defaults`.
// Sequence elements are addressed by index or by their `id`.
void apply_override(YAML::Node root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + spec + "' must have the form key=value");
  }
  std::string key = spec.substr(0, eq);
  const YAML::Node value = YAML::Load(spec.substr(eq + 1));
  if (key.find('.') == std::string::npos) key = "defaults." + key;
  const auto parts = split(key, '.');

  YAML::Node node = root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const std::string& p = parts[i];
    YAML::Node next;
    if (node.IsSequence()) {
      if (is_index(p)) {
        const std::size_t idx = std::stoul(p);
        if (idx >= node.size()) throw ConfigError("override '" + key + "': index " + p + " out of range");
        next = node[idx];
      } else {
        bool found = false;
        for (std::size_t k = 0; k < node.size() && !found; ++k) {
          if (node[k]["id"] && node[k]["id"].as<std::string>() == p) {
            next = node[k];
            found = true;
          }
        }
        if (!found) throw ConfigError("override '" + key + "': no element with id '" + p + "'");
      }
    } else {
      if (!node[p]) node[p] = YAML::Node(YAML::NodeType::Map);
      next = node[p];
    }
    node.reset(next);
  }
  const std::string& last = parts.back();
  if (node.IsSequence() && is_index(last)) {
    node[std::stoul(last)] = value;
  } else {
    node[last] = value;
  }
}

}  // namespace

const ScenarioConfig& ConfigFile::scenario(const std::string& id) const {
  for (const auto& s : scenarios) {
    if (s.id == id) return s;
  }
  throw ConfigError("no scenario with id '" + id + "' in " + path);
}

ConfigFile parse_config(const std::string& text, const std::vector<std::string>& overrides,
                        const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError(path + ": empty config");
  try {
    for (const auto& o : overrides) apply_override(root, o);

    ConfigFile cfg;
    cfg.path = path;
    cfg.source = text;
    if (!overrides.empty()) {
      cfg.source += "\n# overrides:";
      for (const auto& o : overrides) cfg.source += " " + o;
      cfg.source += "\n";
    }
    check_keys(root, {"defaults", "population", "scenarios"}, "config");

    if (const YAML::Node d = root["defaults"]) {
      check_keys(d, {"seed", "reps", "n", "workers", "out"}, "defaults");
      if (d["seed"]) cfg.defaults.seed = as_count(d["seed"], "defaults.seed");
      if (d["reps"]) cfg.defaults.reps = as_count(d["reps"], "defaults.reps");
      if (d["n"]) cfg.defaults.n = as_count(d["n"], "defaults.n");
      if (d["workers"]) cfg.defaults.workers = as_count(d["workers"], "defaults.workers");
      if (d["out"]) cfg.defaults.out = as_string(d["out"], "defaults.out");
    }
    cfg.population = population_from(required(root, "population", "config"));

    const YAML::Node list = required(root, "scenarios", "config");
    if (!list.IsSequence() || list.size() == 0) fail(list, "scenarios must be a non-empty list");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const YAML::Node s = list[i];
      const std::string where = "scenarios[" + std::to_string(i + 1) + "]";
      check_keys(s, {"id", "randomizer", "constraint", "estimators", "observe_x", "n", "reps", "seed"},
                 where);
      ScenarioConfig sc;
      sc.id = s["id"] ? as_string(s["id"], where + ".id") : "scenario" + std::to_string(i + 1);
      if (!ids.insert(sc.id).second) fail(s, "duplicate scenario id '" + sc.id + "'");
      sc.pop = cfg.population;
      sc.randomizer = randomizer_from(required(s, "randomizer", where), where + ".randomizer");
      sc.constraint_c = s["constraint"] ? as_real(s["constraint"], where + ".constraint")
                                        : default_constraint(sc.randomizer);
      if (s["estimators"]) sc.estimators = estimators_from(s["estimators"], where + ".estimators");
      sc.observe_x = s["observe_x"] ? as_bool(s["observe_x"], where + ".observe_x") : true;
      sc.n = s["n"] ? as_count(s["n"], where + ".n") : cfg.defaults.n;
      sc.reps = s["reps"] ? as_count(s["reps"], where + ".reps") : cfg.defaults.reps;
      sc.base_seed = s["seed"] ? as_count(s["seed"], where + ".seed") : cfg.defaults.seed;
      sc.workers = cfg.defaults.workers;
      sc.config_echo = cfg.source;
      if (sc.n == 0) fail(s, where + ": n must be >= 1");
      if (sc.reps == 0) fail(s, where + ": reps must be >= 1");
      cfg.scenarios.push_back(std::move(sc));
    }
    return cfg;
  } catch (const YAML::Exception& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ConfigFile load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides, path);
}

PopulationSpec parse_population(const std::string& yaml_text) {
  return population_from(YAML::Load(yaml_text));
}

RandomizerSpec parse_randomizer(const std::string& yaml_text) {
  return randomizer_from(YAML::Load(yaml_text), "randomizer");
}

AllocationTargetSpec parse_target(const std::string& yaml_text) {
  return target_from(YAML::Load(yaml_text), "target");
}

}  // namespace cara
