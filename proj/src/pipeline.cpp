#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "egotergm/errors.hpp"
#include "egotergm/estimator.hpp"
#include "egotergm/mixture.hpp"
#include "egotergm/pipeline.hpp"
#include "egotergm/random.hpp"
#include "egotergm/sampler.hpp"

namespace egotergm {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path output_dir(const RunConfig& cfg, const RunOverrides& o) {
  fs::path dir = o.out ? *o.out : cfg.output;
  if (dir.empty()) throw ConfigError("no output directory: set 'output' or pass --out");
  fs::create_directories(dir);
  return dir;
}

std::uint64_t run_seed(const RunConfig& cfg, const RunOverrides& o) {
  return o.seed ? *o.seed : cfg.seed;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw Error(fmt::format("write to '{}' failed", path.string()));
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

/// Indices of the configured periods selected by --period.
std::vector<std::size_t> selected_periods(const RunConfig& cfg, const RunOverrides& o) {
  std::vector<std::size_t> out;
  for (const auto& name : o.periods) {
    const bool known = std::any_of(cfg.periods.begin(), cfg.periods.end(),
                                   [&](const PeriodConfig& p) { return p.period.name == name; });
    if (!known) throw ConfigError(fmt::format("--period: no period named '{}'", name));
  }
  for (std::size_t i = 0; i < cfg.periods.size(); ++i) {
    const auto& name = cfg.periods[i].period.name;
    if (o.periods.empty() || std::find(o.periods.begin(), o.periods.end(), name) != o.periods.end())
      out.push_back(i);
  }
  return out;
}

std::vector<LongitudinalNetwork> partition_periods(const RunConfig& cfg, const LongitudinalNetwork& net) {
  std::vector<PeriodDef> defs;
  for (const auto& p : cfg.periods) defs.push_back(p.period);
  return partition(net, defs);
}

std::vector<std::string> read_ego_list(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot read ego list '{}'", path.string()));
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) return {};
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
  const auto col = std::find(fields.begin(), fields.end(), "ego_id");
  if (col == fields.end())
    throw DataError(fmt::format("{}:1: missing column 'ego_id'", path.string()));
  const auto idx = static_cast<std::size_t>(col - fields.begin());
  std::vector<std::string> ids;
  while (reader.next(fields)) {
    if (fields.size() <= idx)
      throw DataError(fmt::format("{}:{}: too few fields", path.string(), reader.line()));
    ids.push_back(fields[idx]);
  }
  return ids;
}

struct RoleFile {
  std::vector<std::string> ego_ids;
  std::vector<int> hard_labels;
  int G = 0;
};

RoleFile read_role_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError(fmt::format("missing role assignments '{}'; run 'fit' first", path.string()));
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields) || fields.size() < 3 || fields.front() != "ego_id" ||
      fields.back() != "hard_label")
    throw DataError(fmt::format("{}:1: unexpected header", path.string()));
  RoleFile rf;
  rf.G = static_cast<int>(fields.size()) - 2;
  while (reader.next(fields)) {
    if (fields.size() != static_cast<std::size_t>(rf.G) + 2)
      throw DataError(fmt::format("{}:{}: expected {} fields", path.string(), reader.line(), rf.G + 2));
    int label = -1;
    try {
      label = std::stoi(fields.back());
    } catch (const std::exception&) {
    }
    if (label < 0 || label >= rf.G)
      throw DataError(fmt::format("{}:{}: field 'hard_label' is not a role index", path.string(),
                                  reader.line()));
    rf.ego_ids.push_back(fields.front());
    rf.hard_labels.push_back(label);
  }
  return rf;
}

std::string network_summary(const LongitudinalNetwork& net) {
  std::string out = "year,nodes,ties,density\n";
  for (const auto& s : net.slices()) {
    const double n = static_cast<double>(s.nodes.size());
    const double pairs = n * (n - 1) / 2;
    const double density = pairs > 0 ? static_cast<double>(s.ties.size()) / pairs : 0.0;
    out += fmt::format("{},{},{},{}\n", s.year, s.nodes.size(), s.ties.size(), num(density));
  }
  return out;
}

json manifest_header(const RunConfig& cfg, const RunOverrides& o, const char* command) {
  json m;
  m["program"] = "egotergm";
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = run_seed(cfg, o);
  m["config_sha256"] = sha256_hex(cfg.text);
  m["min_alters"] = cfg.min_alters;
  return m;
}

}  // namespace

IngestResult load_network(const RunConfig& cfg) {
  std::vector<DyadYearRecord> dyads = read_dyad_csv_file(cfg.dyads.string());
  const std::vector<NodeYearAttrs> nodes = read_node_csv_file(cfg.nodes.string());
  if (cfg.collapse_duplicates) dyads = collapse_treaties(dyads);
  IngestResult result = ingest_dyad_years(dyads, nodes, cfg.span);
  if (dyads.empty()) result.report.warnings.push_back("dyad file holds no rows; every density is 0");
  return result;
}

EgoExtraction period_egos(const RunConfig& cfg, const LongitudinalNetwork& period_net) {
  EgoExtraction ex = extract_egos(period_net, cfg.min_alters);
  if (cfg.egos.empty()) return ex;
  const auto list = read_ego_list(cfg.egos);
  const std::set<std::string> keep(list.begin(), list.end());
  std::erase_if(ex.egos, [&](const EgoSeries& e) { return !keep.count(e.ego_id); });
  return ex;
}

void cmd_ingest(const RunConfig& cfg, const RunOverrides& o, std::ostream& log) {
  const fs::path dir = output_dir(cfg, o);
  const IngestResult data = load_network(cfg);
  const LongitudinalNetwork& net = data.network;
  write_file(dir / "network_summary.csv", network_summary(net));

  std::vector<std::string> warnings = data.report.warnings;
  std::string excl = "period,actor,max_degree\n";
  const auto parts = partition_periods(cfg, net);
  for (const std::size_t i : selected_periods(cfg, o)) {
    const auto& name = cfg.periods[i].period.name;
    if (parts[i].empty()) {
      warnings.push_back(fmt::format("period '{}' has no years inside the span", name));
      continue;
    }
    try {
      const EgoExtraction ex = extract_egos(parts[i], cfg.min_alters);
      for (const auto& e : ex.excluded)
        excl += fmt::format("{},{},{}\n", csv_escape(name), csv_escape(e.actor), e.max_degree);
      log << fmt::format("{}: {} egos, {} actors below {} alters\n", name, ex.egos.size(),
                         ex.excluded.size(), cfg.min_alters);
    } catch (const DataError& e) {
      warnings.push_back(fmt::format("period '{}': {}", name, e.what()));
    }
  }
  write_file(dir / "exclusions.csv", excl);

  std::string text = fmt::format("slices: {}\nties: {}\nimputed node-years: {}\n", net.size(),
                                 net.tie_count(), data.report.imputed_node_years);
  for (const auto& w : warnings) {
    text += "warning: " + w + "\n";
    log << "warning: " << w << "\n";
  }
  write_file(dir / "ingest_log.txt", text);
  log << fmt::format("ingested {} slices, {} tie-years\n", net.size(), net.tie_count());
}

void cmd_fit(const RunConfig& cfg, const RunOverrides& o, std::ostream& log) {
  const fs::path dir = output_dir(cfg, o);
  const std::uint64_t seed = run_seed(cfg, o);
  const IngestResult data = load_network(cfg);
  const auto parts = partition_periods(cfg, data.network);

  json manifest = manifest_header(cfg, o, "fit");
  json periods = json::array();
  std::vector<std::string> failures;
  for (const std::size_t i : selected_periods(cfg, o)) {
    const PeriodConfig& pc = cfg.periods[i];
    const std::string slug = slugify(pc.period.name);
    json entry;
    entry["name"] = pc.period.name;
    entry["slug"] = slug;
    entry["terms"] = pc.terms;
    try {
      const EgoExtraction ex = period_egos(cfg, parts[i]);
      const ModelSpec spec = ModelSpec::parse(pc.terms);
      const EgoPopulation pop(ex.egos, spec);
      MixtureOptions mo;
      mo.jobs = o.jobs;
      const RoleSelection sel =
          select_roles(pop, pc.g_min, pc.g_max, pc.cap, stream_seed(seed, {0x666974ULL, i}), mo);
      const MixtureFit& best = sel.best;

      std::string bic = "G,log_pl,bic,converged,iterations,degenerate_roles\n";
      for (const auto& f : sel.fits) {
        std::string degenerate;
        for (const int g : f.degenerate_roles) degenerate += (degenerate.empty() ? "" : ";") + std::to_string(g);
        bic += fmt::format("{},{},{},{},{},{}\n", f.G, num(f.log_pl), num(f.bic), f.converged ? 1 : 0,
                           f.iterations, degenerate);
      }
      write_file(dir / ("bic_" + slug + ".csv"), bic);

      const RoleAssignment ra = assignment_matrix(best);
      std::string roles = "ego_id";
      for (const auto& r : ra.role_labels) roles += "," + r;
      roles += ",hard_label\n";
      for (std::size_t n = 0; n < ra.ego_ids.size(); ++n) {
        roles += csv_escape(ra.ego_ids[n]);
        for (Eigen::Index g = 0; g < ra.matrix.cols(); ++g)
          roles += "," + num(ra.matrix(static_cast<Eigen::Index>(n), g));
        roles += fmt::format(",{}\n", ra.hard_labels[n]);
      }
      write_file(dir / ("roles_" + slug + ".csv"), roles);

      std::string params = "role,pi";
      for (const auto& l : best.labels) params += "," + csv_escape(l);
      params += "\n";
      for (int g = 0; g < best.G; ++g) {
        params += fmt::format("role_{},{}", g, num(best.pis[static_cast<std::size_t>(g)]));
        for (const double v : best.thetas[static_cast<std::size_t>(g)]) params += "," + num(v);
        params += "\n";
      }
      write_file(dir / ("params_" + slug + ".csv"), params);

      std::string egos = "ego_id,max_alters,slices,rows\n";
      for (std::size_t n = 0; n < ex.egos.size(); ++n)
        egos += fmt::format("{},{},{},{}\n", csv_escape(ex.egos[n].ego_id), ex.egos[n].max_alters(),
                            ex.egos[n].slices.size(), pop.row_count(n));
      write_file(dir / ("egos_" + slug + ".csv"), egos);

      for (const auto& w : best.warnings) log << fmt::format("{}: warning: {}\n", pc.period.name, w);
      log << fmt::format("{}: {} egos, selected {} role(s), BIC {:.4f}\n", pc.period.name,
                         ex.egos.size(), best.G, best.bic);
      entry["status"] = "ok";
      entry["egos"] = ex.egos.size();
      entry["excluded"] = ex.excluded.size();
      entry["selected_roles"] = best.G;
      entry["converged"] = best.converged;
    } catch (const EstimationError& e) {
      const std::string msg = fmt::format("period '{}': {}", pc.period.name, e.what());
      log << "error: " << msg << "\n";
      failures.push_back(msg);
      entry["status"] = "failed";
      entry["error"] = e.what();
    }
    periods.push_back(std::move(entry));
  }
  manifest["periods"] = std::move(periods);
  write_file(dir / "manifest_fit.json", manifest.dump(2) + "\n");

  if (!failures.empty()) {
    std::string msg = failures.front();
    for (std::size_t k = 1; k < failures.size(); ++k) msg += "; " + failures[k];
    throw EstimationError(msg);
  }
}

void cmd_pooled(const RunConfig& cfg, const RunOverrides& o, std::ostream& log) {
  const fs::path dir = output_dir(cfg, o);
  const std::uint64_t seed = run_seed(cfg, o);
  const IngestResult data = load_network(cfg);
  const auto parts = partition_periods(cfg, data.network);
  const auto selected = selected_periods(cfg, o);

  BootstrapOptions base;
  base.replications = o.replications ? *o.replications : cfg.replications;
  if (base.replications < 1) throw ConfigError("--replications must be at least 1");
  base.confidence = cfg.confidence;
  base.jobs = o.jobs;

  // Role members by period name and role index.
  std::map<std::string, std::vector<std::vector<EgoSeries>>> members;
  for (std::size_t i = 0; i < cfg.periods.size(); ++i) {
    const PeriodConfig& pc = cfg.periods[i];
    const bool wanted = std::find(selected.begin(), selected.end(), i) != selected.end();
    const bool mapped = std::any_of(cfg.role_map.begin(), cfg.role_map.end(), [&](const PooledRole& r) {
      return std::any_of(r.members.begin(), r.members.end(),
                         [&](const auto& m) { return m.first == pc.period.name; });
    });
    if (!wanted && !mapped) continue;
    const RoleFile rf = read_role_file(dir / ("roles_" + slugify(pc.period.name) + ".csv"));
    const EgoExtraction ex = period_egos(cfg, parts[i]);
    std::map<std::string, const EgoSeries*> by_id;
    for (const auto& e : ex.egos) by_id[e.ego_id] = &e;
    auto& groups = members[pc.period.name];
    groups.assign(static_cast<std::size_t>(rf.G), {});
    for (std::size_t n = 0; n < rf.ego_ids.size(); ++n) {
      const auto it = by_id.find(rf.ego_ids[n]);
      if (it == by_id.end())
        throw DataError(fmt::format("role file for '{}' lists '{}', which is not an ego of the period",
                                    pc.period.name, rf.ego_ids[n]));
      groups[static_cast<std::size_t>(rf.hard_labels[n])].push_back(*it->second);
    }
  }

  json manifest = manifest_header(cfg, o, "pooled");
  manifest["replications"] = base.replications;
  manifest["confidence"] = base.confidence;
  json tables = json::array();

  // One table per group of roles sharing a term list.
  auto run_table = [&](const std::string& table_name, const std::string& table_file,
                       const std::vector<std::string>& terms,
                       const std::vector<std::pair<std::string, std::vector<EgoSeries>>>& roles,
                       std::uint64_t table_tag) {
    const ModelSpec spec = ModelSpec::parse(terms);
    std::vector<BootstrapResult> results;
    std::vector<NamedResult> columns;
    json jroles = json::array();
    results.reserve(roles.size());
    for (std::size_t r = 0; r < roles.size(); ++r) {
      const auto& [role_name, egos] = roles[r];
      json jr;
      jr["role"] = role_name;
      jr["members"] = egos.size();
      if (egos.empty()) {
        log << fmt::format("{}: {} has no members; skipped\n", table_name, role_name);
        jr["status"] = "skipped: no members";
        jroles.push_back(std::move(jr));
        continue;
      }
      BootstrapOptions bo = base;
      bo.seed = stream_seed(seed, {0x706f6f6cULL, table_tag, r});
      try {
        results.push_back(pooled_role_tergm(egos, spec, bo));
      } catch (const EstimationError& e) {
        log << fmt::format("{}: {} skipped: {}\n", table_name, role_name, e.what());
        jr["status"] = fmt::format("skipped: {}", e.what());
        jroles.push_back(std::move(jr));
        continue;
      }
      const BootstrapResult& res = results.back();
      const std::string file = fmt::format("pooled_{}_{}.csv", table_file, slugify(role_name));
      std::ostringstream csv;
      write_coefficient_csv(res, csv);
      write_file(dir / file, csv.str());
      NamedResult col{fmt::format("{} ({} egos)", role_name, egos.size()), nullptr, {}};
      if (egos.size() == 1) {
        col.notes.push_back("low-N: single ego");
        log << fmt::format("{}: {} has a single member; flagged low-N\n", table_name, role_name);
      }
      columns.push_back(std::move(col));
      jr["status"] = egos.size() == 1 ? "low-N" : "ok";
      jr["file"] = file;
      jr["replicates_used"] = res.used();
      jr["unstable"] = res.unstable;
      jroles.push_back(std::move(jr));
    }
    for (std::size_t c = 0; c < columns.size(); ++c) columns[c].result = &results[c];
    const std::string table_path = fmt::format("coefficients_{}.txt", table_file);
    if (!columns.empty()) write_file(dir / table_path, render_coefficient_table(columns));
    json jt;
    jt["table"] = table_name;
    jt["file"] = columns.empty() ? json() : json(table_path);
    jt["terms"] = terms;
    jt["roles"] = std::move(jroles);
    tables.push_back(std::move(jt));
    log << fmt::format("{}: {} role column(s)\n", table_name, columns.size());
  };

  for (const std::size_t i : selected) {
    const PeriodConfig& pc = cfg.periods[i];
    std::vector<std::pair<std::string, std::vector<EgoSeries>>> roles;
    const auto& groups = members.at(pc.period.name);
    for (std::size_t g = 0; g < groups.size(); ++g) roles.emplace_back(fmt::format("Role {}", g), groups[g]);
    run_table(pc.period.name, slugify(pc.period.name), pc.terms, roles, i);
  }

  if (!cfg.role_map.empty()) {
    std::vector<std::pair<std::string, std::vector<EgoSeries>>> roles;
    for (const auto& role : cfg.role_map) {
      std::vector<EgoSeries> egos;
      for (const auto& [period, index] : role.members) {
        const auto& groups = members.at(period);
        if (index >= static_cast<int>(groups.size())) {
          log << fmt::format("{}: '{}' has no role {}; reference ignored\n", role.name, period, index);
          continue;
        }
        const auto& g = groups[static_cast<std::size_t>(index)];
        egos.insert(egos.end(), g.begin(), g.end());
      }
      roles.emplace_back(role.name, std::move(egos));
    }
    run_table("Pooled roles", "pooled", cfg.pooled_terms, roles, 0x6d6170ULL);
  }

  manifest["tables"] = std::move(tables);
  write_file(dir / "manifest_pooled.json", manifest.dump(2) + "\n");
}

void cmd_report(const RunConfig& cfg, const RunOverrides& o, std::ostream& log) {
  const fs::path dir = output_dir(cfg, o);
  struct Row {
    std::string period, years, egos, roles, reported, terms;
  };
  std::vector<Row> rows{{"Period", "Years", "Egos", "Roles", "Published roles", "Model terms"}};
  for (const std::size_t i : selected_periods(cfg, o)) {
    const PeriodConfig& pc = cfg.periods[i];
    const std::string slug = slugify(pc.period.name);
    Row row{pc.period.name, fmt::format("{}-{}", pc.period.start_year, pc.period.end_year), "-", "-",
            pc.reported_roles > 0 ? std::to_string(pc.reported_roles) : "-", ""};
    for (std::size_t t = 0; t < pc.terms.size(); ++t) row.terms += (t ? ", " : "") + pc.terms[t];

    if (std::ifstream in(dir / ("egos_" + slug + ".csv"), std::ios::binary); in) {
      CsvReader reader(in);
      std::vector<std::string> fields;
      int count = -1;
      while (reader.next(fields)) ++count;
      row.egos = std::to_string(std::max(count, 0));
    }
    if (std::ifstream in(dir / ("bic_" + slug + ".csv"), std::ios::binary); in) {
      CsvReader reader(in);
      std::vector<std::string> fields;
      reader.next(fields);
      double best = 0;
      int best_g = 0;
      while (reader.next(fields)) {
        if (fields.size() < 3) continue;
        const double b = std::stod(fields[2]);
        if (best_g == 0 || b < best) {
          best = b;
          best_g = std::stoi(fields[0]);
        }
      }
      if (best_g > 0) row.roles = std::to_string(best_g);
    }
    rows.push_back(std::move(row));
  }

  std::size_t w[5] = {0, 0, 0, 0, 0};
  for (const auto& r : rows) {
    w[0] = std::max(w[0], r.period.size());
    w[1] = std::max(w[1], r.years.size());
    w[2] = std::max(w[2], r.egos.size());
    w[3] = std::max(w[3], r.roles.size());
    w[4] = std::max(w[4], r.reported.size());
  }
  std::string text;
  const std::size_t rule_width = w[0] + w[1] + w[2] + w[3] + w[4] + 10 + 40;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    text += fmt::format("{:<{}}  {:<{}}  {:>{}}  {:>{}}  {:>{}}  {}\n", r.period, w[0], r.years, w[1],
                        r.egos, w[2], r.roles, w[3], r.reported, w[4], r.terms);
    if (k == 0) text += std::string(rule_width, '=') + "\n";
  }
  text += std::string(rule_width, '=') + "\n";
  text += fmt::format("Egos: actors with at least {} alters in some year of the period.\n", cfg.min_alters);
  text += "Roles: role count selected by BIC; Published roles: count given in the configuration.\n";
  write_file(dir / "model_fit_details.txt", text);
  log << fmt::format("wrote {}\n", (dir / "model_fit_details.txt").string());
}

void cmd_simulate(const SimulateConfig& cfg, const RunOverrides& o, std::ostream& log) {
  if (!o.out) throw ConfigError("simulate needs --out");
  const fs::path dir = *o.out;
  fs::create_directories(dir);

  SimulateConfig run = cfg;
  if (o.seed) run.sampler.seed = *o.seed;
  std::vector<std::vector<double>> thetas;
  for (const auto& c : run.clusters) thetas.push_back(c.theta);
  const int G = static_cast<int>(thetas.size());
  const PlantedPopulation pop =
      plant_population(G, thetas, run.egos_per_cluster, run.sampler, run.start_year, o.jobs);

  const ExportedRows rows = export_population(pop.egos);
  const YearSpan span{run.start_year, run.start_year + run.sampler.slices - 1};
  const IngestResult data = ingest_dyad_years(rows.dyads, rows.nodes, span);
  {
    std::ostringstream d, n;
    write_dyad_csv(data.network, d);
    write_node_csv(data.network, n);
    write_file(dir / "dyads.csv", d.str());
    write_file(dir / "nodes.csv", n.str());
  }
  std::string truth = "ego_id,cluster,cluster_name\n";
  for (std::size_t e = 0; e < pop.egos.size(); ++e)
    truth += fmt::format("{},{},{}\n", csv_escape(pop.egos[e].ego_id), pop.truth[e],
                         csv_escape(run.clusters[static_cast<std::size_t>(pop.truth[e])].name));
  write_file(dir / "truth.csv", truth);

  YAML::Emitter y;
  y << YAML::BeginMap;
  y << YAML::Key << "data" << YAML::Value << YAML::BeginMap;
  y << YAML::Key << "dyads" << YAML::Value << "dyads.csv";
  y << YAML::Key << "nodes" << YAML::Value << "nodes.csv";
  y << YAML::Key << "egos" << YAML::Value << "truth.csv";
  y << YAML::EndMap;
  y << YAML::Key << "span" << YAML::Value << YAML::Flow << YAML::BeginSeq << span.start << span.end
    << YAML::EndSeq;
  y << YAML::Key << "min_alters" << YAML::Value
    << (run.run_min_alters > 0 ? run.run_min_alters : run.sampler.n_nodes);
  y << YAML::Key << "seed" << YAML::Value << run.sampler.seed;
  y << YAML::Key << "output" << YAML::Value << "results";
  y << YAML::Key << "bootstrap" << YAML::Value << YAML::BeginMap;
  y << YAML::Key << "replications" << YAML::Value << run.run_replications;
  y << YAML::Key << "confidence" << YAML::Value << "0.95";
  y << YAML::EndMap;
  y << YAML::Key << "periods" << YAML::Value << YAML::BeginSeq << YAML::BeginMap;
  y << YAML::Key << "name" << YAML::Value << "synthetic";
  y << YAML::Key << "years" << YAML::Value << YAML::Flow << YAML::BeginSeq << span.start << span.end
    << YAML::EndSeq;
  y << YAML::Key << "roles" << YAML::Value << YAML::Flow << YAML::BeginSeq << run.run_g_min
    << run.run_g_max << YAML::EndSeq;
  y << YAML::Key << "cap" << YAML::Value << run.run_cap;
  y << YAML::Key << "terms" << YAML::Value << YAML::BeginSeq;
  for (const auto& t : run.terms) y << t;
  y << YAML::EndSeq << YAML::EndMap << YAML::EndSeq << YAML::EndMap;
  write_file(dir / "run.yaml", std::string(y.c_str()) + "\n");

  log << fmt::format("simulated {} egos in {} cluster(s) over {} years into {}\n", pop.egos.size(), G,
                     span.size(), dir.string());
}

}  // namespace egotergm
