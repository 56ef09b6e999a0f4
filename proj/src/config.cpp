#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "egotergm/changestats.hpp"
#include "egotergm/config.hpp"
#include "egotergm/errors.hpp"

namespace egotergm {
namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, 3> kNodeAttrs = {attr::kRegime, attr::kCinc,
                                                        attr::kRevisionist};
constexpr std::array<std::string_view, 7> kDyadAttrs = {
    attr::kDefensive, attr::kOffensive,           attr::kNeutrality,    attr::kNonaggression,
    attr::kSecret,    attr::kInstitutionalization, attr::kAllianceYears};

template <typename T>
T scalar(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}: invalid value '{}'", where, node.Scalar()));
  }
}

template <typename T>
T get(const YAML::Node& map, const char* key, T fallback, const std::string& where) {
  const YAML::Node node = map[key];
  if (!node) return fallback;
  return scalar<T>(node, where.empty() ? key : where + "." + key);
}

std::pair<int, int> int_pair(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence() || node.size() != 2)
    throw ConfigError(fmt::format("{}: expected a two-element list", where));
  return {scalar<int>(node[0], where), scalar<int>(node[1], where)};
}

std::vector<std::string> string_list(const YAML::Node& node, const std::string& where) {
  if (!node || !node.IsSequence()) throw ConfigError(fmt::format("{}: expected a list", where));
  std::vector<std::string> out;
  for (const auto& item : node) out.push_back(scalar<std::string>(item, where));
  return out;
}

void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!map.IsMap()) throw ConfigError(fmt::format("{}: expected a mapping", where));
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

/// Parses the terms and checks that each referenced attribute is part of
/// the input schema.
ModelSpec checked_spec(const std::vector<std::string>& terms, const std::string& where) {
  if (terms.empty()) throw ConfigError(fmt::format("{}: empty term list", where));
  ModelSpec spec = ModelSpec::parse(terms);
  for (const auto& t : spec.terms) {
    const bool node_term = t.kind == TermKind::NodeMatch || t.kind == TermKind::AbsDiff;
    const bool dyad_term = t.kind == TermKind::EdgeCov;
    if (node_term && std::find(kNodeAttrs.begin(), kNodeAttrs.end(), t.attr) == kNodeAttrs.end())
      throw ConfigError(
          fmt::format("{}: term '{}' uses unknown node attribute '{}'", where, t.label, t.attr));
    if (dyad_term && std::find(kDyadAttrs.begin(), kDyadAttrs.end(), t.attr) == kDyadAttrs.end())
      throw ConfigError(
          fmt::format("{}: term '{}' uses unknown dyad attribute '{}'", where, t.label, t.attr));
  }
  return spec;
}

YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("configuration is not valid YAML: {}", e.what()));
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const fs::path& base_dir) {
  const YAML::Node root = load_yaml(text);
  if (!root.IsMap()) throw ConfigError("run configuration must be a mapping");
  check_keys(root, {"data", "span", "min_alters", "seed", "output", "bootstrap", "periods", "pooled"},
             "config");
  RunConfig cfg;
  cfg.text = text;

  const YAML::Node data = root["data"];
  if (!data) throw ConfigError("config: missing 'data' section");
  check_keys(data, {"dyads", "nodes", "egos", "collapse_duplicates"}, "data");
  if (!data["dyads"] || !data["nodes"]) throw ConfigError("data: 'dyads' and 'nodes' are required");
  cfg.dyads = resolve(base_dir, scalar<std::string>(data["dyads"], "data.dyads"));
  cfg.nodes = resolve(base_dir, scalar<std::string>(data["nodes"], "data.nodes"));
  if (data["egos"]) cfg.egos = resolve(base_dir, scalar<std::string>(data["egos"], "data.egos"));
  cfg.collapse_duplicates = get<bool>(data, "collapse_duplicates", false, "data");

  if (!root["span"]) throw ConfigError("config: missing 'span'");
  const auto [s, e] = int_pair(root["span"], "span");
  if (s > e) throw ConfigError(fmt::format("span: start {} after end {}", s, e));
  cfg.span = {s, e};
  cfg.min_alters = get<int>(root, "min_alters", 5, "");
  if (cfg.min_alters < 1) throw ConfigError("min_alters must be at least 1");
  cfg.seed = get<std::uint64_t>(root, "seed", 0, "");
  if (root["output"]) cfg.output = resolve(base_dir, scalar<std::string>(root["output"], "output"));

  if (const YAML::Node b = root["bootstrap"]) {
    check_keys(b, {"replications", "confidence"}, "bootstrap");
    cfg.replications = get<int>(b, "replications", 500, "bootstrap");
    cfg.confidence = get<double>(b, "confidence", 0.95, "bootstrap");
  }
  if (cfg.replications < 1) throw ConfigError("bootstrap.replications must be at least 1");
  if (!(cfg.confidence > 0 && cfg.confidence < 1))
    throw ConfigError("bootstrap.confidence must lie in (0, 1)");

  const YAML::Node periods = root["periods"];
  if (!periods || !periods.IsSequence() || periods.size() == 0)
    throw ConfigError("config: 'periods' must be a non-empty list");
  std::vector<PeriodDef> defs;
  for (std::size_t i = 0; i < periods.size(); ++i) {
    const YAML::Node p = periods[i];
    const std::string where = fmt::format("periods[{}]", i);
    check_keys(p, {"name", "years", "roles", "cap", "reported_roles", "terms"}, where);
    PeriodConfig pc;
    if (!p["name"] || !p["years"]) throw ConfigError(where + ": 'name' and 'years' are required");
    pc.period.name = scalar<std::string>(p["name"], where + ".name");
    const auto [ys, ye] = int_pair(p["years"], where + ".years");
    pc.period.start_year = ys;
    pc.period.end_year = ye;
    if (p["roles"]) std::tie(pc.g_min, pc.g_max) = int_pair(p["roles"], where + ".roles");
    pc.cap = get<int>(p, "cap", 4, where);
    pc.reported_roles = get<int>(p, "reported_roles", 0, where);
    if (pc.g_min < 1 || pc.g_min > pc.g_max)
      throw ConfigError(fmt::format("{}: invalid role range [{}, {}]", where, pc.g_min, pc.g_max));
    if (pc.cap < 1) throw ConfigError(where + ": cap must be at least 1");
    pc.terms = string_list(p["terms"], where + ".terms");
    checked_spec(pc.terms, where + ".terms");
    for (const auto& other : cfg.periods)
      if (other.period.name == pc.period.name)
        throw ConfigError(fmt::format("duplicate period name '{}'", pc.period.name));
    defs.push_back(pc.period);
    cfg.periods.push_back(std::move(pc));
  }
  validate_periods(defs);

  if (const YAML::Node pooled = root["pooled"]) {
    check_keys(pooled, {"terms", "roles"}, "pooled");
    if (pooled["terms"]) {
      cfg.pooled_terms = string_list(pooled["terms"], "pooled.terms");
      checked_spec(cfg.pooled_terms, "pooled.terms");
    }
    if (const YAML::Node roles = pooled["roles"]) {
      if (!roles.IsMap()) throw ConfigError("pooled.roles: expected a mapping");
      if (cfg.pooled_terms.empty())
        throw ConfigError("pooled.roles requires pooled.terms shared by every role");
      for (const auto& kv : roles) {
        PooledRole role;
        role.name = kv.first.as<std::string>();
        for (const auto& ref : string_list(kv.second, "pooled.roles." + role.name)) {
          const auto slash = ref.rfind('/');
          if (slash == std::string::npos)
            throw ConfigError(fmt::format("pooled.roles.{}: '{}' is not '<period>/<role>'", role.name, ref));
          const std::string period = ref.substr(0, slash);
          int index = -1;
          try {
            std::size_t used = 0;
            index = std::stoi(ref.substr(slash + 1), &used);
            if (used != ref.size() - slash - 1) index = -1;
          } catch (const std::exception&) {
          }
          if (index < 0)
            throw ConfigError(fmt::format("pooled.roles.{}: bad role index in '{}'", role.name, ref));
          const bool known = std::any_of(cfg.periods.begin(), cfg.periods.end(),
                                         [&](const PeriodConfig& pc) { return pc.period.name == period; });
          if (!known)
            throw ConfigError(fmt::format("pooled.roles.{}: unknown period '{}'", role.name, period));
          role.members.emplace_back(period, index);
        }
        cfg.role_map.push_back(std::move(role));
      }
    }
  }
  return cfg;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(read_text_file(path), path.parent_path());
}

SimulateConfig parse_simulate_config(const std::string& text) {
  const YAML::Node root = load_yaml(text);
  if (!root.IsMap()) throw ConfigError("simulation configuration must be a mapping");
  check_keys(root,
             {"seed", "start_year", "slices", "n_nodes", "burnin", "thin", "persistence",
              "egos_per_cluster", "terms", "clusters", "attributes", "run"},
             "simulate");
  SimulateConfig cfg;
  cfg.text = text;
  SamplerConfig& s = cfg.sampler;
  s.seed = get<std::uint64_t>(root, "seed", 0, "");
  s.n_nodes = get<int>(root, "n_nodes", 12, "");
  s.slices = get<int>(root, "slices", 20, "");
  s.burnin = get<int>(root, "burnin", 20, "");
  s.thin = get<int>(root, "thin", 1, "");
  s.persistence = get<bool>(root, "persistence", false, "");
  cfg.start_year = get<int>(root, "start_year", 2000, "");
  cfg.egos_per_cluster = get<int>(root, "egos_per_cluster", 10, "");
  cfg.terms = string_list(root["terms"], "terms");
  s.spec = checked_spec(cfg.terms, "terms");

  const YAML::Node clusters = root["clusters"];
  if (!clusters || !clusters.IsSequence() || clusters.size() == 0)
    throw ConfigError("simulate: 'clusters' must be a non-empty list");
  for (std::size_t g = 0; g < clusters.size(); ++g) {
    const std::string where = fmt::format("clusters[{}]", g);
    check_keys(clusters[g], {"name", "theta"}, where);
    ClusterConfig c;
    c.name = get<std::string>(clusters[g], "name", fmt::format("cluster_{}", g), where);
    const YAML::Node theta = clusters[g]["theta"];
    if (!theta || !theta.IsSequence()) throw ConfigError(where + ".theta: expected a list");
    for (const auto& v : theta) c.theta.push_back(scalar<double>(v, where + ".theta"));
    if (c.theta.size() != cfg.terms.size())
      throw ConfigError(fmt::format("{}.theta has {} values for {} terms", where, c.theta.size(),
                                    cfg.terms.size()));
    cfg.clusters.push_back(std::move(c));
  }
  s.theta = cfg.clusters.front().theta;

  if (const YAML::Node attrs = root["attributes"]) {
    if (!attrs.IsSequence()) throw ConfigError("attributes: expected a list");
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      const std::string where = fmt::format("attributes[{}]", a);
      check_keys(attrs[a], {"name", "kind", "p", "low", "high", "values", "dyadic"}, where);
      AttributeGenerator gen;
      if (!attrs[a]["name"]) throw ConfigError(where + ": 'name' is required");
      gen.name = scalar<std::string>(attrs[a]["name"], where + ".name");
      gen.dyadic = get<bool>(attrs[a], "dyadic", false, where);
      const auto& known = gen.dyadic ? std::span<const std::string_view>(kDyadAttrs)
                                     : std::span<const std::string_view>(kNodeAttrs);
      if (std::find(known.begin(), known.end(), gen.name) == known.end())
        throw ConfigError(fmt::format("{}: '{}' is not a {} attribute of the data schema", where,
                                      gen.name, gen.dyadic ? "dyad" : "node"));
      const auto kind = get<std::string>(attrs[a], "kind", "bernoulli", where);
      if (kind == "bernoulli") {
        gen.kind = AttributeGenerator::Kind::Bernoulli;
        gen.p = get<double>(attrs[a], "p", 0.5, where);
      } else if (kind == "uniform") {
        gen.kind = AttributeGenerator::Kind::Uniform;
        gen.low = get<double>(attrs[a], "low", 0.0, where);
        gen.high = get<double>(attrs[a], "high", 1.0, where);
      } else if (kind == "fixed") {
        gen.kind = AttributeGenerator::Kind::Fixed;
        const YAML::Node values = attrs[a]["values"];
        if (!values || !values.IsSequence()) throw ConfigError(where + ".values: expected a list");
        for (const auto& v : values) gen.values.push_back(scalar<double>(v, where + ".values"));
      } else {
        throw ConfigError(fmt::format("{}: unknown kind '{}'", where, kind));
      }
      s.attributes.push_back(std::move(gen));
    }
  }

  if (const YAML::Node run = root["run"]) {
    check_keys(run, {"min_alters", "roles", "cap", "replications"}, "run");
    cfg.run_min_alters = get<int>(run, "min_alters", 0, "run");
    if (run["roles"]) std::tie(cfg.run_g_min, cfg.run_g_max) = int_pair(run["roles"], "run.roles");
    cfg.run_cap = get<int>(run, "cap", 4, "run");
    cfg.run_replications = get<int>(run, "replications", 500, "run");
  }
  if (cfg.egos_per_cluster < 1) throw ConfigError("egos_per_cluster must be at least 1");
  s.validate();
  return cfg;
}

SimulateConfig load_simulate_config(const fs::path& path) {
  return parse_simulate_config(read_text_file(path));
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string slugify(const std::string& name) {
  std::string out;
  bool gap = false;
  for (const unsigned char c : name) {
    if (std::isalnum(c)) {
      if (gap && !out.empty()) out += '_';
      out += static_cast<char>(std::tolower(c));
      gap = false;
    } else {
      gap = true;
    }
  }
  return out.empty() ? "unnamed" : out;
}

}  // namespace egotergm
