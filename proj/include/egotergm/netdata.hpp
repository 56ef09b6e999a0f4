#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "egotergm/graph.hpp"

namespace egotergm {

// Attribute names exposed on Graph slices built from network data.
namespace attr {
inline constexpr const char* kRegime = "regime";  // 1 = democracy
inline constexpr const char* kCinc = "cinc";
inline constexpr const char* kRevisionist = "revisionist";
inline constexpr const char* kDefensive = "defensive";
inline constexpr const char* kOffensive = "offensive";
inline constexpr const char* kNeutrality = "neutrality";
inline constexpr const char* kNonaggression = "nonaggression";
inline constexpr const char* kSecret = "secret";
inline constexpr const char* kInstitutionalization = "institutionalization";
inline constexpr const char* kAllianceYears = "alliance_years";
}  // namespace attr

struct NodeYearAttrs {
  std::string actor;
  int year = 0;
  bool regime_democracy = false;
  double cinc = 0.0;
  bool revisionist = false;
};

struct DyadYearRecord {
  std::string actor_a;
  std::string actor_b;
  int year = 0;
  bool defensive = false;
  bool offensive = false;
  bool neutrality = false;
  bool nonaggression = false;
  bool secret = false;
  double institutionalization = 0.0;
  int alliance_years = 0;

  /// Offensive, defensive, neutrality or non-aggression; `secret` is a
  /// provision, not a commitment.
  bool has_commitment() const { return defensive || offensive || neutrality || nonaggression; }
};

struct YearSpan {
  int start = 0;
  int end = 0;
  int size() const { return end - start + 1; }
  bool contains(int year) const { return year >= start && year <= end; }
};

struct PeriodDef {
  std::string name;
  int start_year = 0;
  int end_year = 0;
  int size() const { return end_year - start_year + 1; }
  bool contains(int year) const { return year >= start_year && year <= end_year; }
  bool operator==(const PeriodDef&) const = default;
};

struct NodeAttrs {
  bool regime_democracy = false;
  double cinc = 0.0;
  bool revisionist = false;
  bool imputed = false;

  // The imputation marker is bookkeeping, not data.
  bool operator==(const NodeAttrs& o) const {
    return regime_democracy == o.regime_democracy && cinc == o.cinc &&
           revisionist == o.revisionist;
  }
};

struct TieAttrs {
  bool defensive = false;
  bool offensive = false;
  bool neutrality = false;
  bool nonaggression = false;
  bool secret = false;
  double institutionalization = 0.0;
  int alliance_years = 0;
  bool operator==(const TieAttrs&) const = default;
};

using Dyad = std::pair<std::string, std::string>;  // ordered: first < second

inline Dyad make_dyad(const std::string& a, const std::string& b) {
  return a < b ? Dyad{a, b} : Dyad{b, a};
}

/// One annual slice: present actors with attributes, and the tie set.
struct YearSlice {
  int year = 0;
  std::map<std::string, NodeAttrs> nodes;
  std::map<Dyad, TieAttrs> ties;
  std::map<std::string, std::vector<std::string>> adjacency;  // derived, sorted

  int degree(const std::string& actor) const;
  const std::vector<std::string>& neighbors(const std::string& actor) const;
  bool has_tie(const std::string& a, const std::string& b) const {
    return ties.count(make_dyad(a, b)) != 0;
  }
  /// Induced subgraph on `actors` (in the given order) with node and dyad
  /// attributes attached. Untied dyads carry 0 for every dyad attribute.
  Graph induced_graph(std::span<const std::string> actors) const;
  void rebuild_adjacency();

  bool operator==(const YearSlice& o) const { return year == o.year && nodes == o.nodes && ties == o.ties; }
};

/// Annual undirected network sequence over a contiguous run of years.
class LongitudinalNetwork {
 public:
  LongitudinalNetwork() = default;
  LongitudinalNetwork(PeriodDef period, std::vector<YearSlice> slices);

  const PeriodDef& period() const { return period_; }
  const std::vector<YearSlice>& slices() const { return slices_; }
  std::size_t size() const { return slices_.size(); }
  bool empty() const { return slices_.empty(); }
  std::vector<int> years() const;
  const YearSlice& slice(int year) const;
  /// Every actor present in at least one slice, sorted.
  std::vector<std::string> actors() const;
  std::size_t tie_count() const;

  bool operator==(const LongitudinalNetwork& o) const { return slices_ == o.slices_; }

 private:
  PeriodDef period_;
  std::vector<YearSlice> slices_;
};

struct IngestReport {
  std::vector<std::string> warnings;
  int imputed_node_years = 0;
  int alliance_year_mismatches = 0;
  int rows_without_commitment = 0;
  int node_rows_outside_span = 0;
};

struct IngestResult {
  LongitudinalNetwork network;
  IngestReport report;
};

/// Builds the annual network over `span`. Throws DataError on duplicate
/// dyad-years, self-ties, out-of-span dyad rows and invalid attribute values.
IngestResult ingest_dyad_years(std::span<const DyadYearRecord> rows,
                               std::span<const NodeYearAttrs> node_rows, YearSpan span);

/// Merges several treaty rows for the same dyad-year into one: commitment
/// flags are OR-ed and institutionalization takes the maximum.
std::vector<DyadYearRecord> collapse_treaties(std::span<const DyadYearRecord> rows);

/// Overwrites alliance_years with the run length of consecutive tie years
/// (0 in the first year of a run).
void assign_alliance_years(std::vector<DyadYearRecord>& rows);

/// Rejects unordered or overlapping periods.
void validate_periods(std::span<const PeriodDef> periods);

/// One network per period holding exactly that period's slices. A period
/// with no overlap with the network yields an empty network.
std::vector<LongitudinalNetwork> partition(const LongitudinalNetwork& net,
                                           std::span<const PeriodDef> periods);

struct EgoSlice {
  int year = 0;
  std::vector<std::string> alters;  // sorted
  Graph graph;                      // induced on alters, ego excluded
};

/// One actor's first-order ego-network over a period.
struct EgoSeries {
  std::string ego_id;
  PeriodDef period;
  std::vector<EgoSlice> slices;

  int max_alters() const;
  std::vector<Graph> graphs() const;
  std::vector<int> years() const;
};

struct Exclusion {
  std::string actor;
  int max_degree = 0;
};

struct EgoExtraction {
  std::vector<EgoSeries> egos;
  std::vector<Exclusion> excluded;
};

/// Ego-networks of every actor whose maximum yearly degree in the period
/// reaches `min_alters`. Only first-order alters are supported.
EgoExtraction extract_egos(const LongitudinalNetwork& period_net, int min_alters = 5,
                           int order = 1);

// CSV interchange. Readers report schema violations with 1-based line
// numbers; `source` names the stream in messages.
std::vector<DyadYearRecord> read_dyad_csv(std::istream& in, const std::string& source);
std::vector<NodeYearAttrs> read_node_csv(std::istream& in, const std::string& source);
void write_dyad_csv(const LongitudinalNetwork& net, std::ostream& out);
/// Imputed node-years are omitted; re-ingesting imputes them again.
void write_node_csv(const LongitudinalNetwork& net, std::ostream& out);

std::vector<DyadYearRecord> read_dyad_csv_file(const std::string& path);
std::vector<NodeYearAttrs> read_node_csv_file(const std::string& path);

/// Minimal RFC 4180 reader: one record per call, false at end of input.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}
  bool next(std::vector<std::string>& fields);
  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

std::string csv_escape(const std::string& field);

}  // namespace egotergm
