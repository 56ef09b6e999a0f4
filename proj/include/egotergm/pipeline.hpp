#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "egotergm/config.hpp"
#include "egotergm/netdata.hpp"

namespace egotergm {

inline constexpr const char* kVersion = "0.1.0";

/// Command-line overrides applied on top of a configuration.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::vector<std::string> periods;  // empty: all periods
  std::optional<int> replications;
  int jobs = 1;
};

/// Reads both CSV files and builds the network over the configured span.
IngestResult load_network(const RunConfig& cfg);

/// Ego-networks of one period, restricted to the configured ego list if any.
EgoExtraction period_egos(const RunConfig& cfg, const LongitudinalNetwork& period_net);

// Each command writes into the output directory and logs progress to `log`.
// Failures surface as ConfigError, DataError or EstimationError.
void cmd_ingest(const RunConfig& cfg, const RunOverrides& o, std::ostream& log);
void cmd_fit(const RunConfig& cfg, const RunOverrides& o, std::ostream& log);
void cmd_pooled(const RunConfig& cfg, const RunOverrides& o, std::ostream& log);
void cmd_report(const RunConfig& cfg, const RunOverrides& o, std::ostream& log);
void cmd_simulate(const SimulateConfig& cfg, const RunOverrides& o, std::ostream& log);

}  // namespace egotergm
