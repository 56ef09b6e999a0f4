#include "egotergm/netdata.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "egotergm/errors.hpp"

namespace egotergm {

namespace {

constexpr std::size_t kMaxListedWarnings = 10;

const std::vector<std::string> kNoNeighbors;

}  // namespace

int YearSlice::degree(const std::string& actor) const {
  auto it = adjacency.find(actor);
  return it == adjacency.end() ? 0 : static_cast<int>(it->second.size());
}

const std::vector<std::string>& YearSlice::neighbors(const std::string& actor) const {
  auto it = adjacency.find(actor);
  return it == adjacency.end() ? kNoNeighbors : it->second;
}

void YearSlice::rebuild_adjacency() {
  adjacency.clear();
  for (const auto& [dyad, _] : ties) {
    adjacency[dyad.first].push_back(dyad.second);
    adjacency[dyad.second].push_back(dyad.first);
  }
  for (auto& [_, list] : adjacency) std::sort(list.begin(), list.end());
}

Graph YearSlice::induced_graph(std::span<const std::string> actors) const {
  const int n = static_cast<int>(actors.size());
  Graph g(n);
  std::vector<double> regime(actors.size()), cinc(actors.size()), revisionist(actors.size());
  for (std::size_t k = 0; k < actors.size(); ++k) {
    auto it = nodes.find(actors[k]);
    if (it == nodes.end())
      throw DataError(fmt::format("actor '{}' is not present in year {}", actors[k], year));
    regime[k] = it->second.regime_democracy ? 1.0 : 0.0;
    cinc[k] = it->second.cinc;
    revisionist[k] = it->second.revisionist ? 1.0 : 0.0;
  }
  g.set_node_attr(attr::kRegime, std::move(regime));
  g.set_node_attr(attr::kCinc, std::move(cinc));
  g.set_node_attr(attr::kRevisionist, std::move(revisionist));
  for (const char* name : {attr::kDefensive, attr::kOffensive, attr::kNeutrality,
                           attr::kNonaggression, attr::kSecret, attr::kInstitutionalization,
                           attr::kAllianceYears})
    g.ensure_dyad_attr(name);

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      auto it = ties.find(make_dyad(actors[static_cast<std::size_t>(i)],
                                    actors[static_cast<std::size_t>(j)]));
      if (it == ties.end()) continue;
      const TieAttrs& t = it->second;
      g.set_edge(i, j, true);
      g.set_dyad_attr(attr::kDefensive, i, j, t.defensive);
      g.set_dyad_attr(attr::kOffensive, i, j, t.offensive);
      g.set_dyad_attr(attr::kNeutrality, i, j, t.neutrality);
      g.set_dyad_attr(attr::kNonaggression, i, j, t.nonaggression);
      g.set_dyad_attr(attr::kSecret, i, j, t.secret);
      g.set_dyad_attr(attr::kInstitutionalization, i, j, t.institutionalization);
      g.set_dyad_attr(attr::kAllianceYears, i, j, t.alliance_years);
    }
  }
  return g;
}

LongitudinalNetwork::LongitudinalNetwork(PeriodDef period, std::vector<YearSlice> slices)
    : period_(std::move(period)), slices_(std::move(slices)) {
  for (std::size_t k = 1; k < slices_.size(); ++k)
    if (slices_[k].year != slices_[k - 1].year + 1)
      throw DataError("network slices must cover consecutive years");
}

std::vector<int> LongitudinalNetwork::years() const {
  std::vector<int> out;
  out.reserve(slices_.size());
  for (const auto& s : slices_) out.push_back(s.year);
  return out;
}

const YearSlice& LongitudinalNetwork::slice(int year) const {
  if (slices_.empty() || year < slices_.front().year || year > slices_.back().year)
    throw DataError(fmt::format("year {} is not in the network", year));
  return slices_[static_cast<std::size_t>(year - slices_.front().year)];
}

std::vector<std::string> LongitudinalNetwork::actors() const {
  std::set<std::string> all;
  for (const auto& s : slices_)
    for (const auto& [actor, _] : s.nodes) all.insert(actor);
  return {all.begin(), all.end()};
}

std::size_t LongitudinalNetwork::tie_count() const {
  std::size_t total = 0;
  for (const auto& s : slices_) total += s.ties.size();
  return total;
}

void assign_alliance_years(std::vector<DyadYearRecord>& rows) {
  std::vector<std::size_t> order(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) order[k] = k;
  auto key = [&](std::size_t k) {
    return std::make_tuple(make_dyad(rows[k].actor_a, rows[k].actor_b), rows[k].year);
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  for (std::size_t k = 0; k < order.size(); ++k) {
    DyadYearRecord& r = rows[order[k]];
    if (k > 0) {
      const DyadYearRecord& prev = rows[order[k - 1]];
      if (make_dyad(prev.actor_a, prev.actor_b) == make_dyad(r.actor_a, r.actor_b) &&
          prev.year + 1 == r.year) {
        r.alliance_years = prev.alliance_years + 1;
        continue;
      }
    }
    r.alliance_years = 0;
  }
}

std::vector<DyadYearRecord> collapse_treaties(std::span<const DyadYearRecord> rows) {
  std::map<std::tuple<Dyad, int>, DyadYearRecord> merged;
  for (const auto& r : rows) {
    Dyad d = make_dyad(r.actor_a, r.actor_b);
    auto [it, inserted] = merged.try_emplace({d, r.year}, r);
    if (inserted) {
      it->second.actor_a = d.first;
      it->second.actor_b = d.second;
      continue;
    }
    DyadYearRecord& m = it->second;
    m.defensive = m.defensive || r.defensive;
    m.offensive = m.offensive || r.offensive;
    m.neutrality = m.neutrality || r.neutrality;
    m.nonaggression = m.nonaggression || r.nonaggression;
    m.secret = m.secret || r.secret;
    m.institutionalization = std::max(m.institutionalization, r.institutionalization);
    m.alliance_years = std::max(m.alliance_years, r.alliance_years);
  }
  std::vector<DyadYearRecord> out;
  out.reserve(merged.size());
  for (auto& [_, r] : merged) out.push_back(std::move(r));
  return out;
}

IngestResult ingest_dyad_years(std::span<const DyadYearRecord> rows,
                               std::span<const NodeYearAttrs> node_rows, YearSpan span) {
  if (span.start > span.end)
    throw ConfigError(fmt::format("invalid span {}-{}", span.start, span.end));

  IngestReport report;
  std::vector<YearSlice> slices(static_cast<std::size_t>(span.size()));
  for (int k = 0; k < span.size(); ++k) slices[static_cast<std::size_t>(k)].year = span.start + k;
  auto slice_of = [&](int year) -> YearSlice& {
    return slices[static_cast<std::size_t>(year - span.start)];
  };

  std::set<std::tuple<Dyad, int>> seen;
  std::vector<DyadYearRecord> kept;
  kept.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const DyadYearRecord& r = rows[k];
    if (r.actor_a.empty() || r.actor_b.empty())
      throw DataError(fmt::format("dyad row {}: empty actor id", k + 1));
    if (r.actor_a == r.actor_b)
      throw DataError(fmt::format("dyad row {}: self-tie for actor '{}'", k + 1, r.actor_a));
    if (!span.contains(r.year))
      throw DataError(fmt::format("dyad row {}: year {} outside span {}-{}", k + 1, r.year,
                                  span.start, span.end));
    if (!std::isfinite(r.institutionalization) || r.institutionalization < 0)
      throw DataError(fmt::format("dyad row {}: institutionalization must be >= 0", k + 1));
    if (r.alliance_years < 0)
      throw DataError(fmt::format("dyad row {}: alliance_years must be >= 0", k + 1));
    Dyad d = make_dyad(r.actor_a, r.actor_b);
    if (!seen.insert({d, r.year}).second)
      throw DataError(fmt::format("duplicate dyad-year ({}, {}) in {}", d.first, d.second, r.year));
    if (!r.has_commitment()) {
      ++report.rows_without_commitment;
      continue;
    }
    kept.push_back(r);
  }
  if (report.rows_without_commitment > 0)
    report.warnings.push_back(fmt::format(
        "{} dyad-year rows carry no offensive, defensive, neutrality or non-aggression "
        "commitment and were not treated as ties",
        report.rows_without_commitment));

  std::vector<DyadYearRecord> recomputed = kept;
  assign_alliance_years(recomputed);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (kept[k].alliance_years == recomputed[k].alliance_years) continue;
    if (static_cast<std::size_t>(report.alliance_year_mismatches) < kMaxListedWarnings)
      report.warnings.push_back(fmt::format(
          "alliance_years for ({}, {}) in {}: supplied {}, recomputed {}", kept[k].actor_a,
          kept[k].actor_b, kept[k].year, kept[k].alliance_years, recomputed[k].alliance_years));
    ++report.alliance_year_mismatches;
  }
  if (static_cast<std::size_t>(report.alliance_year_mismatches) > kMaxListedWarnings)
    report.warnings.push_back(fmt::format("{} alliance_years mismatches in total; recomputed values used",
                                          report.alliance_year_mismatches));

  for (const auto& r : recomputed) {
    TieAttrs t{r.defensive, r.offensive,           r.neutrality,    r.nonaggression,
               r.secret,    r.institutionalization, r.alliance_years};
    slice_of(r.year).ties.emplace(make_dyad(r.actor_a, r.actor_b), t);
  }

  std::set<std::string> attributed_actors;
  std::set<std::tuple<std::string, int>> seen_nodes;
  for (std::size_t k = 0; k < node_rows.size(); ++k) {
    const NodeYearAttrs& a = node_rows[k];
    if (a.actor.empty()) throw DataError(fmt::format("node row {}: empty actor id", k + 1));
    if (!(a.cinc >= 0.0 && a.cinc <= 1.0))
      throw DataError(fmt::format("node row {}: cinc {} for '{}' outside [0,1]", k + 1, a.cinc, a.actor));
    if (!seen_nodes.insert({a.actor, a.year}).second)
      throw DataError(fmt::format("duplicate node attributes for '{}' in {}", a.actor, a.year));
    if (!span.contains(a.year)) {
      ++report.node_rows_outside_span;
      continue;
    }
    attributed_actors.insert(a.actor);
    slice_of(a.year).nodes[a.actor] = NodeAttrs{a.regime_democracy, a.cinc, a.revisionist, false};
  }
  if (report.node_rows_outside_span > 0)
    report.warnings.push_back(fmt::format("{} node-attribute rows outside the span were ignored",
                                          report.node_rows_outside_span));

  std::set<std::string> unknown_actors;
  for (auto& s : slices) {
    for (const auto& [dyad, _] : s.ties) {
      for (const std::string* actor : {&dyad.first, &dyad.second}) {
        if (s.nodes.count(*actor)) continue;
        s.nodes[*actor] = NodeAttrs{false, 0.0, false, true};
        ++report.imputed_node_years;
        if (!attributed_actors.count(*actor)) unknown_actors.insert(*actor);
      }
    }
    s.rebuild_adjacency();
  }
  if (!unknown_actors.empty()) {
    std::string names;
    std::size_t listed = 0;
    for (const auto& a : unknown_actors) {
      if (listed++ == kMaxListedWarnings) {
        names += ", ...";
        break;
      }
      names += (names.empty() ? "" : ", ") + a;
    }
    report.warnings.push_back(fmt::format("{} actors appear in dyad rows without any node attributes: {}",
                                          unknown_actors.size(), names));
  }
  if (report.imputed_node_years > 0)
    report.warnings.push_back(fmt::format(
        "{} actor-years lacked node attributes and were imputed as non-democratic, "
        "non-revisionist with cinc 0",
        report.imputed_node_years));

  PeriodDef whole{"", span.start, span.end};
  return {LongitudinalNetwork(std::move(whole), std::move(slices)), std::move(report)};
}

void validate_periods(std::span<const PeriodDef> periods) {
  for (std::size_t k = 0; k < periods.size(); ++k) {
    const PeriodDef& p = periods[k];
    if (p.start_year > p.end_year)
      throw ConfigError(fmt::format("period '{}' starts after it ends ({}-{})", p.name,
                                    p.start_year, p.end_year));
    if (k > 0 && p.start_year <= periods[k - 1].end_year)
      throw ConfigError(fmt::format("periods '{}' and '{}' overlap or are out of order",
                                    periods[k - 1].name, p.name));
  }
}

std::vector<LongitudinalNetwork> partition(const LongitudinalNetwork& net,
                                           std::span<const PeriodDef> periods) {
  validate_periods(periods);
  std::vector<LongitudinalNetwork> out;
  out.reserve(periods.size());
  for (const PeriodDef& p : periods) {
    std::vector<YearSlice> chosen;
    for (const auto& s : net.slices())
      if (p.contains(s.year)) chosen.push_back(s);
    out.emplace_back(p, std::move(chosen));
  }
  return out;
}

int EgoSeries::max_alters() const {
  int m = 0;
  for (const auto& s : slices) m = std::max(m, static_cast<int>(s.alters.size()));
  return m;
}

std::vector<Graph> EgoSeries::graphs() const {
  std::vector<Graph> out;
  out.reserve(slices.size());
  for (const auto& s : slices) out.push_back(s.graph);
  return out;
}

std::vector<int> EgoSeries::years() const {
  std::vector<int> out;
  for (const auto& s : slices) out.push_back(s.year);
  return out;
}

EgoExtraction extract_egos(const LongitudinalNetwork& period_net, int min_alters, int order) {
  if (order != 1)
    throw UnsupportedFeature(fmt::format("ego-network order {} is not supported; only first-order alters", order));
  if (min_alters < 1) throw ConfigError("min_alters must be at least 1");
  if (period_net.empty())
    throw DataError(fmt::format("period '{}' has no network slices", period_net.period().name));

  EgoExtraction out;
  for (const std::string& actor : period_net.actors()) {
    int max_degree = 0;
    for (const auto& s : period_net.slices()) max_degree = std::max(max_degree, s.degree(actor));
    if (max_degree < min_alters) {
      out.excluded.push_back({actor, max_degree});
      continue;
    }
    EgoSeries ego;
    ego.ego_id = actor;
    ego.period = period_net.period();
    for (const auto& s : period_net.slices()) {
      EgoSlice es;
      es.year = s.year;
      es.alters = s.neighbors(actor);
      es.graph = s.induced_graph(es.alters);
      ego.slices.push_back(std::move(es));
    }
    out.egos.push_back(std::move(ego));
  }
  return out;
}

}  // namespace egotergm
