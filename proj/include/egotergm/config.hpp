#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "egotergm/netdata.hpp"
#include "egotergm/sampler.hpp"

namespace egotergm {

struct PeriodConfig {
  PeriodDef period;
  int g_min = 1;
  int g_max = 4;
  int cap = 4;
  int reported_roles = 0;  // role count published for the period, 0 if none
  std::vector<std::string> terms;
};

/// A cross-period role: named group of "<period name>/<role index>" refs.
struct PooledRole {
  std::string name;
  std::vector<std::pair<std::string, int>> members;
};

struct RunConfig {
  std::filesystem::path dyads;
  std::filesystem::path nodes;
  std::filesystem::path egos;  // optional list restricting which actors count as egos
  bool collapse_duplicates = false;
  YearSpan span;
  int min_alters = 5;
  std::uint64_t seed = 0;
  std::filesystem::path output;
  int replications = 500;
  double confidence = 0.95;
  std::vector<PeriodConfig> periods;
  std::vector<std::string> pooled_terms;
  std::vector<PooledRole> role_map;
  std::string text;  // raw document, hashed into manifests
};

/// Parses a run configuration; relative paths resolve against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

struct ClusterConfig {
  std::string name;
  std::vector<double> theta;
};

struct SimulateConfig {
  SamplerConfig sampler;  // seed, sizes, terms, attributes
  std::vector<std::string> terms;
  int start_year = 2000;
  int egos_per_cluster = 10;
  std::vector<ClusterConfig> clusters;
  // Written into the generated run configuration.
  int run_min_alters = 0;  // 0: number of alters per ego
  int run_g_min = 1;
  int run_g_max = 4;
  int run_cap = 4;
  int run_replications = 500;
  std::string text;
};

SimulateConfig parse_simulate_config(const std::string& text);
SimulateConfig load_simulate_config(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& data);
/// "Congress of Vienna" -> "congress_of_vienna".
std::string slugify(const std::string& name);

}  // namespace egotergm
