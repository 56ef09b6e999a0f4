#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "egotergm/changestats.hpp"
#include "egotergm/errors.hpp"

namespace egotergm {

std::vector<std::string> find_constant_terms(std::span<const std::string> labels,
                                             std::span<const TermKind> kinds,
                                             const Eigen::MatrixXd& x) {
  std::vector<std::string> out;
  if (x.rows() == 0) return out;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (kinds[t] == TermKind::Edges) continue;
    const auto col = x.col(static_cast<Eigen::Index>(t));
    if ((col.array() == col(0)).all()) out.push_back(labels[t]);
  }
  return out;
}

DesignMatrix design_matrix(std::span<const Graph> slices, std::span<const int> years,
                           const ModelSpec& spec) {
  if (slices.size() != years.size())
    throw std::invalid_argument("design_matrix: one year per slice required");
  if (spec.size() == 0) throw ConfigError("model has no terms");

  Eigen::Index total = 0;
  for (const Graph& g : slices) total += static_cast<Eigen::Index>(g.size()) * (g.size() - 1) / 2;
  if (total == 0) throw DataError("design has no dyads: every slice has fewer than two nodes");

  DesignMatrix d;
  d.labels = spec.labels();
  for (const auto& t : spec.terms) d.kinds.push_back(t.kind);
  d.x.resize(total, static_cast<Eigen::Index>(spec.size()));
  d.y.resize(total);
  d.row_year.reserve(static_cast<std::size_t>(total));
  d.row_dyad.reserve(static_cast<std::size_t>(total));
  d.row_unit.assign(static_cast<std::size_t>(total), 0);
  d.slice_years.assign(years.begin(), years.end());

  std::vector<double> buffer(spec.size());
  Eigen::Index row = 0;
  for (std::size_t s = 0; s < slices.size(); ++s) {
    const Graph& g = slices[s];
    if (g.size() < 2) continue;
    ChangeStatEvaluator eval(spec, g);
    for (int i = 0; i < g.size(); ++i) {
      for (int j = i + 1; j < g.size(); ++j) {
        eval.compute(i, j, buffer);
        for (std::size_t t = 0; t < spec.size(); ++t) d.x(row, static_cast<Eigen::Index>(t)) = buffer[t];
        d.y(row) = g.has_edge(i, j) ? 1.0 : 0.0;
        d.row_year.push_back(years[s]);
        d.row_dyad.emplace_back(i, j);
        ++row;
      }
    }
  }
  d.constant_terms = find_constant_terms(d.labels, d.kinds, d.x);
  return d;
}

DesignMatrix design_matrix(const EgoSeries& series, const ModelSpec& spec) {
  std::vector<Graph> graphs = series.graphs();
  std::vector<int> years = series.years();
  try {
    return design_matrix(graphs, years, spec);
  } catch (const DataError& e) {
    throw DataError(fmt::format("ego '{}': {}", series.ego_id, e.what()));
  }
}

DesignMatrix design_matrix(const LongitudinalNetwork& net, const ModelSpec& spec) {
  std::vector<Graph> graphs;
  std::vector<int> years;
  for (const auto& s : net.slices()) {
    std::vector<std::string> actors;
    for (const auto& [a, _] : s.nodes) actors.push_back(a);
    graphs.push_back(s.induced_graph(actors));
    years.push_back(s.year);
  }
  return design_matrix(graphs, years, spec);
}

DesignMatrix concat_designs(std::span<const DesignMatrix> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_designs: nothing to concatenate");
  DesignMatrix d;
  d.labels = parts.front().labels;
  d.kinds = parts.front().kinds;
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    if (p.labels != d.labels) throw std::invalid_argument("concat_designs: term labels differ");
    total += p.rows();
  }
  d.x.resize(total, static_cast<Eigen::Index>(d.labels.size()));
  d.y.resize(total);
  std::set<int> years;
  Eigen::Index row = 0;
  for (std::size_t u = 0; u < parts.size(); ++u) {
    const auto& p = parts[u];
    d.x.middleRows(row, p.rows()) = p.x;
    d.y.segment(row, p.rows()) = p.y;
    d.row_year.insert(d.row_year.end(), p.row_year.begin(), p.row_year.end());
    d.row_dyad.insert(d.row_dyad.end(), p.row_dyad.begin(), p.row_dyad.end());
    d.row_unit.insert(d.row_unit.end(), static_cast<std::size_t>(p.rows()), static_cast<int>(u));
    years.insert(p.slice_years.begin(), p.slice_years.end());
    row += p.rows();
  }
  d.slice_years.assign(years.begin(), years.end());
  d.units = static_cast<int>(parts.size());
  d.constant_terms = find_constant_terms(d.labels, d.kinds, d.x);
  return d;
}

}  // namespace egotergm
