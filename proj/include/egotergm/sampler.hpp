#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "egotergm/changestats.hpp"
#include "egotergm/graph.hpp"
#include "egotergm/netdata.hpp"
#include "egotergm/random.hpp"

namespace egotergm {

/// How one synthetic attribute is assigned. Node attributes are drawn once
/// per chain and never resampled across slices; dyadic attributes fill a
/// symmetric covariate matrix.
struct AttributeGenerator {
  enum class Kind { Fixed, Bernoulli, Uniform };
  std::string name;
  Kind kind = Kind::Bernoulli;
  bool dyadic = false;
  double p = 0.5;
  double low = 0.0;
  double high = 1.0;
  std::vector<double> values;  // Fixed node attributes, one per node
};

struct SamplerConfig {
  int n_nodes = 10;
  ModelSpec spec;
  std::vector<double> theta;
  int burnin = 20;  // sweeps; one sweep = C(n, 2) proposals
  int thin = 1;     // sweeps between recorded slices when persistent
  int slices = 1;
  std::uint64_t seed = 0;
  std::vector<AttributeGenerator> attributes;
  // false: every slice is an independent chain from the empty graph.
  // true: each slice continues the chain from the previous slice.
  bool persistence = false;

  void validate() const;
};

/// Empty graph on n_nodes carrying the generated attributes.
Graph attribute_template(const SamplerConfig& cfg, Rng& rng);

/// Single-dyad Metropolis toggling with acceptance min(1, exp(+-theta . delta)).
std::vector<Graph> sample_ergm(const SamplerConfig& cfg);
std::vector<Graph> sample_ergm(const SamplerConfig& cfg, const Graph& attributes);

struct PlantedPopulation {
  std::vector<EgoSeries> egos;
  std::vector<int> truth;
};

/// egos_per_cluster ego-networks per role g, alter graphs drawn from
/// thetas[g] over `tmpl.slices` consecutive years starting at first_year.
PlantedPopulation plant_population(int G, std::span<const std::vector<double>> thetas,
                                   int egos_per_cluster, const SamplerConfig& tmpl,
                                   int first_year = 2000, int jobs = 1);

struct ExportedRows {
  std::vector<DyadYearRecord> dyads;
  std::vector<NodeYearAttrs> nodes;
};

/// Dyad-year and node rows reproducing every ego-network: the ego is tied
/// to all its alters each year, alter ties come from the alter graph.
ExportedRows export_population(std::span<const EgoSeries> egos);

}  // namespace egotergm
