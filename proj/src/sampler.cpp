#include <cmath>

#include <fmt/format.h>

#include "egotergm/errors.hpp"
#include "egotergm/parallel.hpp"
#include "egotergm/sampler.hpp"

namespace egotergm {

void SamplerConfig::validate() const {
  if (n_nodes < 2) throw ConfigError("sampler needs at least two nodes");
  if (theta.size() != spec.size())
    throw ConfigError(fmt::format("sampler has {} terms but {} parameters", spec.size(), theta.size()));
  if (burnin < 1 || thin < 1) throw ConfigError("burnin and thin must be at least 1");
  if (slices < 1) throw ConfigError("sampler needs at least one slice");
  for (const auto& a : attributes) {
    if (a.kind == AttributeGenerator::Kind::Fixed &&
        (a.dyadic || a.values.size() != static_cast<std::size_t>(n_nodes)))
      throw ConfigError(fmt::format("fixed attribute '{}' needs one value per node", a.name));
    if (a.kind == AttributeGenerator::Kind::Bernoulli && !(a.p >= 0 && a.p <= 1))
      throw ConfigError(fmt::format("attribute '{}': probability outside [0, 1]", a.name));
    if (a.kind == AttributeGenerator::Kind::Uniform && !(a.low <= a.high))
      throw ConfigError(fmt::format("attribute '{}': empty uniform range", a.name));
  }
}

Graph attribute_template(const SamplerConfig& cfg, Rng& rng) {
  const int n = cfg.n_nodes;
  Graph g(n);
  auto draw = [&](const AttributeGenerator& a) {
    if (a.kind == AttributeGenerator::Kind::Bernoulli) return uniform01(rng) < a.p ? 1.0 : 0.0;
    return a.low + (a.high - a.low) * uniform01(rng);
  };
  for (const auto& a : cfg.attributes) {
    if (a.dyadic) {
      g.ensure_dyad_attr(a.name);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.set_dyad_attr(a.name, i, j, draw(a));
    } else if (a.kind == AttributeGenerator::Kind::Fixed) {
      g.set_node_attr(a.name, a.values);
    } else {
      std::vector<double> v(static_cast<std::size_t>(n));
      for (auto& x : v) x = draw(a);
      g.set_node_attr(a.name, std::move(v));
    }
  }
  return g;
}

namespace {

void run_sweeps(Graph& g, const ChangeStatEvaluator& eval, const SamplerConfig& cfg,
                const std::vector<std::pair<int, int>>& dyads, int sweeps, Rng& rng) {
  const std::size_t K = cfg.spec.size();
  std::vector<double> delta(K);
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t prop = 0; prop < dyads.size(); ++prop) {
      const auto [i, j] = dyads[uniform_index(rng, dyads.size())];
      eval.compute(i, j, delta);
      double exponent = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const double term = cfg.theta[k] * delta[k];
        if (!std::isfinite(term))
          throw EstimationError(fmt::format("non-finite acceptance exponent from term '{}'",
                                            cfg.spec.terms[k].label));
        exponent += term;
      }
      if (g.has_edge(i, j)) exponent = -exponent;
      if (exponent >= 0 || uniform01(rng) < std::exp(exponent)) g.toggle(i, j);
    }
  }
}

}  // namespace

std::vector<Graph> sample_ergm(const SamplerConfig& cfg, const Graph& attributes) {
  cfg.validate();
  if (attributes.size() != cfg.n_nodes)
    throw ConfigError("attribute template size differs from n_nodes");
  std::vector<std::pair<int, int>> dyads;
  for (int i = 0; i < cfg.n_nodes; ++i)
    for (int j = i + 1; j < cfg.n_nodes; ++j) dyads.emplace_back(i, j);

  std::vector<Graph> out;
  out.reserve(static_cast<std::size_t>(cfg.slices));
  Graph g = attributes;
  g.clear_edges();
  if (cfg.persistence) {
    Rng rng = make_rng(cfg.seed, {0x636861696eULL});
    ChangeStatEvaluator eval(cfg.spec, g);
    for (int s = 0; s < cfg.slices; ++s) {
      run_sweeps(g, eval, cfg, dyads, s == 0 ? cfg.burnin : cfg.thin, rng);
      out.push_back(g);
    }
    return out;
  }
  for (int s = 0; s < cfg.slices; ++s) {
    Rng rng = make_rng(cfg.seed, {0x736c696365ULL, static_cast<std::uint64_t>(s)});
    g.clear_edges();
    ChangeStatEvaluator eval(cfg.spec, g);
    run_sweeps(g, eval, cfg, dyads, cfg.burnin, rng);
    out.push_back(g);
  }
  return out;
}

std::vector<Graph> sample_ergm(const SamplerConfig& cfg) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed, {0x61747472ULL});
  return sample_ergm(cfg, attribute_template(cfg, rng));
}

PlantedPopulation plant_population(int G, std::span<const std::vector<double>> thetas,
                                   int egos_per_cluster, const SamplerConfig& tmpl,
                                   int first_year, int jobs) {
  if (G < 1) throw ConfigError("planted population needs at least one role");
  if (thetas.size() != static_cast<std::size_t>(G))
    throw ConfigError(fmt::format("{} roles but {} parameter vectors", G, thetas.size()));
  if (egos_per_cluster < 1) throw ConfigError("egos_per_cluster must be at least 1");
  for (const auto& t : thetas)
    if (t.size() != tmpl.spec.size())
      throw ConfigError(fmt::format("parameter vector has {} entries for {} terms", t.size(),
                                    tmpl.spec.size()));

  const std::size_t total = static_cast<std::size_t>(G) * static_cast<std::size_t>(egos_per_cluster);
  const int digits = static_cast<int>(std::to_string(std::max(tmpl.n_nodes - 1, 1)).size());
  const int ego_digits = std::max(3, static_cast<int>(std::to_string(total - 1).size()));
  PlantedPopulation pop;
  pop.egos.resize(total);
  pop.truth.resize(total);
  parallel_for(total, jobs, [&](std::size_t idx) {
    const int g = static_cast<int>(idx / static_cast<std::size_t>(egos_per_cluster));
    SamplerConfig cfg = tmpl;
    cfg.theta = thetas[static_cast<std::size_t>(g)];
    cfg.seed = stream_seed(tmpl.seed, {0x65676fULL, idx});
    const std::vector<Graph> graphs = sample_ergm(cfg);

    EgoSeries ego;
    ego.ego_id = fmt::format("ego_{:0{}}", idx, ego_digits);
    ego.period = PeriodDef{"synthetic", first_year, first_year + tmpl.slices - 1};
    std::vector<std::string> alters;
    for (int k = 0; k < tmpl.n_nodes; ++k)
      alters.push_back(fmt::format("{}_a{:0{}}", ego.ego_id, k, digits));
    for (int s = 0; s < tmpl.slices; ++s)
      ego.slices.push_back({first_year + s, alters, graphs[static_cast<std::size_t>(s)]});
    pop.egos[idx] = std::move(ego);
    pop.truth[idx] = g;
  });
  return pop;
}

ExportedRows export_population(std::span<const EgoSeries> egos) {
  ExportedRows out;
  auto value = [](const Graph& g, const char* name, int i, int j) {
    const auto* m = g.dyad_attr(name);
    return m ? (*m)[g.index(i, j)] : 0.0;
  };
  auto node_value = [](const Graph& g, const char* name, int i) {
    const auto* v = g.node_attr(name);
    return v ? (*v)[static_cast<std::size_t>(i)] : 0.0;
  };
  for (const auto& ego : egos) {
    for (const auto& s : ego.slices) {
      out.nodes.push_back({ego.ego_id, s.year, false, 0.0, false});
      const Graph& g = s.graph;
      for (int i = 0; i < g.size(); ++i) {
        const std::string& a = s.alters[static_cast<std::size_t>(i)];
        DyadYearRecord spoke;
        spoke.actor_a = ego.ego_id;
        spoke.actor_b = a;
        spoke.year = s.year;
        spoke.nonaggression = true;
        out.dyads.push_back(spoke);

        const double cinc = node_value(g, attr::kCinc, i);
        if (!(cinc >= 0 && cinc <= 1))
          throw DataError(fmt::format("alter '{}' has cinc {} outside [0, 1]", a, cinc));
        out.nodes.push_back({a, s.year, node_value(g, attr::kRegime, i) != 0, cinc,
                             node_value(g, attr::kRevisionist, i) != 0});
        for (int j = i + 1; j < g.size(); ++j) {
          if (!g.has_edge(i, j)) continue;
          DyadYearRecord r;
          r.actor_a = a;
          r.actor_b = s.alters[static_cast<std::size_t>(j)];
          r.year = s.year;
          r.defensive = value(g, attr::kDefensive, i, j) != 0;
          r.offensive = value(g, attr::kOffensive, i, j) != 0;
          r.neutrality = value(g, attr::kNeutrality, i, j) != 0;
          r.secret = value(g, attr::kSecret, i, j) != 0;
          r.institutionalization = value(g, attr::kInstitutionalization, i, j);
          r.nonaggression = value(g, attr::kNonaggression, i, j) != 0 ||
                            !(r.defensive || r.offensive || r.neutrality);
          out.dyads.push_back(std::move(r));
        }
      }
    }
  }
  assign_alliance_years(out.dyads);
  return out;
}

}  // namespace egotergm
