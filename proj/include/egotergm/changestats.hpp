#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "egotergm/graph.hpp"
#include "egotergm/netdata.hpp"

namespace egotergm {

enum class TermKind { Edges, KStar, AltKStar, GWDegree, Triangles, NodeMatch, AbsDiff, EdgeCov };

/// One model statistic.
///
/// Degree-based statistics use the degree-census forms of the statnet
/// `ergm` package, with d_i the degree of node i:
///
///   KStar(k)         sum_i C(d_i, k)
///   AltKStar(lambda) sum_i lambda^2 [ (1 - 1/lambda)^d_i - 1 + d_i/lambda ]
///                    (equal to sum_{k>=2} (-1)^k S_k / lambda^(k-2), S_k the
///                    k-star count)
///   GWDegree(decay)  sum_i e^decay [ 1 - (1 - e^-decay)^d_i ]
///
/// Attribute terms sum over ties: NodeMatch counts ties whose endpoints
/// share the attribute value, AbsDiff sums |a_i - a_j|, EdgeCov sums the dyad
/// covariate. Dyad covariates of untied dyads are 0, so a commitment-type
/// covariate describes the treaty behind a tie. With commitment covariates in
/// a model the baseline tie is a non-aggression or neutrality pact.
struct TermSpec {
  TermKind kind = TermKind::Edges;
  double param = 0.0;  // k, lambda or decay
  std::string attr;
  std::string label;

  bool integer_valued() const;
  bool operator==(const TermSpec&) const = default;
};

TermSpec edges_term();
TermSpec kstar_term(int k);
TermSpec altkstar_term(double lambda);
TermSpec gwdegree_term(double decay);
TermSpec triangles_term();
TermSpec nodematch_term(std::string attr, std::string label = {});
TermSpec absdiff_term(std::string attr, std::string label = {});
TermSpec edgecov_term(std::string attr, std::string label = {});

/// Parses either a descriptive label ("Alternating K-Stars (0.5)",
/// "Regime Homophily", "Defensive Commitments", ...) or the generic form
/// ("edges", "kstar(2)", "altkstar(0.5)", "gwdegree(0.1)", "triangles",
/// "nodematch(regime)", "absdiff(cinc)", "edgecov(secret)").
TermSpec parse_term(std::string_view text);

/// Ordered term list defining a model.
struct ModelSpec {
  std::vector<TermSpec> terms;

  ModelSpec() = default;
  explicit ModelSpec(std::vector<TermSpec> t);
  static ModelSpec parse(std::span<const std::string> texts);

  std::size_t size() const { return terms.size(); }
  std::vector<std::string> labels() const;
};

double global_stat(const TermSpec& term, const Graph& graph);
/// S(graph + ij) - S(graph - ij); independent of the current state of ij.
double change_stat(const TermSpec& term, const Graph& graph, int i, int j);

/// Resolves attribute bindings of a spec against one graph once, then
/// evaluates change statistics for many dyads.
class ChangeStatEvaluator {
 public:
  ChangeStatEvaluator(const ModelSpec& spec, const Graph& graph);
  void compute(int i, int j, std::span<double> out) const;
  double compute_term(std::size_t t, int i, int j) const;

 private:
  const ModelSpec& spec_;
  const Graph& graph_;
  std::vector<const std::vector<double>*> bound_;
  std::vector<std::vector<double>> power_tables_;
};

/// Logistic-regression view of a set of slices. One row per dyad and year:
/// response = tie indicator, predictors = change statistics.
struct DesignMatrix {
  std::vector<std::string> labels;
  std::vector<TermKind> kinds;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<int> row_year;
  std::vector<std::pair<int, int>> row_dyad;  // slice-local node indices
  std::vector<int> row_unit;                  // source series when concatenated
  std::vector<int> slice_years;               // every year, including empty ones
  int units = 1;
  std::vector<std::string> constant_terms;    // non-Edges terms with no variation

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }
};

DesignMatrix design_matrix(std::span<const Graph> slices, std::span<const int> years,
                           const ModelSpec& spec);
DesignMatrix design_matrix(const EgoSeries& series, const ModelSpec& spec);
DesignMatrix design_matrix(const LongitudinalNetwork& net, const ModelSpec& spec);

/// Stacks designs; row_unit records the index of the source design.
DesignMatrix concat_designs(std::span<const DesignMatrix> parts);

/// Labels of non-Edges columns that are constant over all rows.
std::vector<std::string> find_constant_terms(std::span<const std::string> labels,
                                             std::span<const TermKind> kinds,
                                             const Eigen::MatrixXd& x);

}  // namespace egotergm
