#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "egotergm/config.hpp"
#include "egotergm/errors.hpp"
#include "egotergm/pipeline.hpp"

using namespace egotergm;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = EGOTERGM_SOURCE_DIR;
const std::string kCli = EGOTERGM_CLI;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("egotergm_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string read(const fs::path& p) { return read_text_file(p); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  CsvReader reader(in);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> fields;
  while (reader.next(fields)) rows.push_back(fields);
  return rows;
}

int run_cli(const std::string& args) {
  const int status = std::system((kCli + " " + args + " 2>/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kTwoRoles = R"(seed: 3
start_year: 1990
slices: 12
n_nodes: 10
burnin: 10
egos_per_cluster: 6
terms: [Edges, Regime Homophily]
clusters:
  - name: sparse
    theta: [-3.0, 0.5]
  - name: dense
    theta: [-0.8, 0.5]
attributes:
  - name: regime
    kind: bernoulli
    p: 0.5
run:
  roles: [1, 3]
  replications: 40
)";

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read(e.path());
  return out;
}

}  // namespace

TEST_CASE("the shipped period configuration mirrors the six published periods") {
  const RunConfig cfg = load_run_config(kSource / "configs" / "paper_periods.yaml");
  CHECK(cfg.span.size() == 187);
  CHECK(cfg.min_alters == 5);
  CHECK(cfg.replications == 500);
  CHECK(cfg.confidence == 0.95);
  REQUIRE(cfg.periods.size() == 6);
  const std::vector<std::string> base{"Edges", "Alternating K-Stars (0.5)", "Regime Homophily",
                                      "CINC Difference", "Revisionist Difference"};
  auto with = [&](std::vector<std::string> extra) {
    auto t = base;
    t.insert(t.end(), extra.begin(), extra.end());
    return t;
  };
  const struct {
    const char* name;
    int start, end, roles;
    std::vector<std::string> terms;
  } expected[] = {
      {"Congress of Vienna", 1816, 1848, 3, with({"Defensive Commitments", "Alliance Years"})},
      {"Nationalism and Bismarckian", 1849, 1890, 4, with({"Defensive Commitments", "Alliance Years"})},
      {"Pre-WW1", 1891, 1918, 2,
       with({"Defensive Commitments", "Offensive Commitments", "Secret Provisions", "Alliance Years"})},
      {"Interwar", 1919, 1945, 1, with({"Defensive Commitments", "Offensive Commitments", "Alliance Years"})},
      {"Containment and Bipolar", 1946, 1991, 4, with({"Alliance Years"})},
      {"Liberal International", 1992, 2002, 4, with({"Alliance Years"})},
  };
  for (std::size_t p = 0; p < 6; ++p) {
    const PeriodConfig& pc = cfg.periods[p];
    CHECK(pc.period.name == expected[p].name);
    CHECK(pc.period.start_year == expected[p].start);
    CHECK(pc.period.end_year == expected[p].end);
    CHECK(pc.reported_roles == expected[p].roles);
    CHECK(pc.cap == 4);
    CHECK(pc.g_max <= 4);
    CHECK(pc.terms == expected[p].terms);
  }
  CHECK(cfg.pooled_terms.size() == 11);
}

TEST_CASE("the Balancers demo simulates") {
  const SimulateConfig cfg = load_simulate_config(kSource / "configs" / "balancers_demo.yaml");
  REQUIRE(cfg.clusters.size() == 1);
  CHECK(cfg.clusters[0].name == "Balancers");
  CHECK(cfg.terms[0] == "Edges");
  CHECK(cfg.clusters[0].theta[0] == -5.95);
  CHECK(cfg.terms[1] == "Triangles");
  CHECK(cfg.clusters[0].theta[1] == 0.97);
  CHECK(cfg.terms[2] == "GW Degree (0.1)");
  CHECK(cfg.clusters[0].theta[2] == 7.86);
}

TEST_CASE("run configurations are validated") {
  const std::string head = "data: {dyads: d.csv, nodes: n.csv}\nspan: [1900, 1950]\n";
  auto parse = [&](const std::string& rest) { return parse_run_config(head + rest, "/tmp"); };
  CHECK_NOTHROW(parse("periods:\n  - {name: a, years: [1900, 1920], terms: [Edges]}\n"));
  CHECK(parse("periods:\n  - {name: a, years: [1900, 1920], terms: [Edges]}\n").dyads == "/tmp/d.csv");
  CHECK_THROWS_AS(parse("periods:\n  - {name: a, years: [1900, 1920], terms: [Gravity]}\n"), ConfigError);
  CHECK_THROWS_AS(parse("periods:\n  - {name: a, years: [1900, 1920], terms: [absdiff(gdp)]}\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("periods:\n  - {name: a, years: [1900, 1920], terms: [Edges]}\n"
                        "  - {name: b, years: [1910, 1930], terms: [Edges]}\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("periods:\n  - {name: a, years: [1900, 1920], roles: [3, 2], terms: [Edges]}\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("periods: []\n"), ConfigError);
  CHECK_THROWS_AS(parse("colour: red\nperiods:\n  - {name: a, years: [1900, 1920], terms: [Edges]}\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("periods:\n  - {name: a, years: [1900, 1920], terms: [Edges]}\n"
                        "pooled:\n  terms: [Edges]\n  roles: {Balancers: [b/0]}\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config("data: [", "/tmp"), ConfigError);
}

TEST_CASE("slugs and digests") {
  CHECK(slugify("Congress of Vienna") == "congress_of_vienna");
  CHECK(slugify("Pre-WW1") == "pre_ww1");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("ingest writes a summary row per year and reports line errors") {
  const fs::path dir = scratch("ingest");
  write(dir / "dyads.csv",
        "actor_a,actor_b,year,defensive,offensive,neutrality,nonaggression,secret,institutionalization,"
        "alliance_years\n");
  write(dir / "nodes.csv", "actor,year,polity,cinc,revisionist\nA,1816,0,0.1,0\nB,1816,8,0.2,0\n");
  write(dir / "run.yaml",
        "data: {dyads: dyads.csv, nodes: nodes.csv}\nspan: [1816, 2002]\noutput: out\n"
        "periods:\n  - {name: Congress of Vienna, years: [1816, 1848], terms: [Edges]}\n");
  std::ostringstream log;
  cmd_ingest(load_run_config(dir / "run.yaml"), {}, log);
  const auto rows = read_csv(dir / "out" / "network_summary.csv");
  REQUIRE(rows.size() == 188);
  CHECK(rows[0] == std::vector<std::string>{"year", "nodes", "ties", "density"});
  CHECK(rows[1] == std::vector<std::string>{"1816", "2", "0", "0"});
  for (std::size_t r = 1; r < rows.size(); ++r) CHECK(rows[r][3] == "0");
  CHECK(read(dir / "out" / "ingest_log.txt").find("warning: dyad file holds no rows") != std::string::npos);

  std::string bad =
      "actor_a,actor_b,year,defensive,offensive,neutrality,nonaggression,secret,institutionalization,"
      "alliance_years\n";
  for (int line = 2; line < 12; ++line) bad += "A,B," + std::to_string(1800 + line + 20) + ",1,0,0,0,0,0,0\n";
  bad += "A,B,18x5,1,0,0,0,0,0,0\n";
  write(dir / "dyads.csv", bad);
  try {
    cmd_ingest(load_run_config(dir / "run.yaml"), {}, log);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(":12:") != std::string::npos);
  }
  CHECK(run_cli("ingest --config " + (dir / "run.yaml").string()) == 3);
}

TEST_CASE("simulate, ingest, fit, pooled and report run end to end") {
  const fs::path dir = scratch("e2e");
  write(dir / "sim.yaml", kTwoRoles);
  const fs::path data = dir / "data";
  REQUIRE(run_cli("simulate --config " + (dir / "sim.yaml").string() + " --out " + data.string()) == 0);
  const std::string cfg = (data / "run.yaml").string();
  REQUIRE(run_cli("ingest --config " + cfg) == 0);
  REQUIRE(run_cli("fit --config " + cfg + " --jobs 2") == 0);
  REQUIRE(run_cli("pooled --config " + cfg + " --replications 30 --jobs 2") == 0);
  REQUIRE(run_cli("report --config " + cfg) == 0);

  const fs::path out = data / "results";
  const auto summary = read_csv(out / "network_summary.csv");
  CHECK(summary.size() == 13);

  const auto bic = read_csv(out / "bic_synthetic.csv");
  REQUIRE(bic.size() == 4);
  CHECK(bic[0] == std::vector<std::string>{"G", "log_pl", "bic", "converged", "iterations", "degenerate_roles"});
  std::size_t best = 1;
  for (std::size_t r = 2; r < bic.size(); ++r)
    if (std::stod(bic[r][2]) < std::stod(bic[best][2])) best = r;
  CHECK(bic[best][0] == "2");

  const auto roles = read_csv(out / "roles_synthetic.csv");
  REQUIRE(roles.size() == 13);
  CHECK(roles[0] == std::vector<std::string>{"ego_id", "role_0", "role_1", "hard_label"});
  for (std::size_t r = 1; r < roles.size(); ++r)
    CHECK(std::stod(roles[r][1]) + std::stod(roles[r][2]) == doctest::Approx(1.0).epsilon(1e-9));

  const auto params = read_csv(out / "params_synthetic.csv");
  CHECK(params[0] == std::vector<std::string>{"role", "pi", "Edges", "Regime Homophily"});
  CHECK(params.size() == 3);

  const auto pooled = read_csv(out / "pooled_synthetic_role_0.csv");
  CHECK(pooled[0] ==
        std::vector<std::string>{"term", "estimate", "ci_low", "ci_high", "significant", "n_obs", "n_replicates_used"});
  CHECK(pooled.size() == 3);
  const std::string table = read(out / "coefficients_synthetic.txt");
  CHECK(table.find("Num. obs.") != std::string::npos);
  CHECK(table.find("30 replications") != std::string::npos);
  CHECK(table.find("* 0 outside the 95% bootstrapped confidence interval") != std::string::npos);

  const auto manifest = nlohmann::json::parse(read(out / "manifest_fit.json"));
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["config_sha256"] == sha256_hex(read(data / "run.yaml")));
  CHECK(manifest["periods"][0]["selected_roles"] == 2);
  CHECK(read(out / "model_fit_details.txt").find("synthetic") != std::string::npos);
}

TEST_CASE("identical runs give byte-identical outputs") {
  const fs::path dir = scratch("determinism");
  write(dir / "sim.yaml", kTwoRoles);
  for (const char* name : {"a", "b"}) {
    const fs::path data = dir / name;
    REQUIRE(run_cli("simulate --config " + (dir / "sim.yaml").string() + " --out " + data.string()) == 0);
    const std::string cfg = (data / "run.yaml").string();
    REQUIRE(run_cli("ingest --config " + cfg) == 0);
    REQUIRE(run_cli("fit --config " + cfg + (name[0] == 'a' ? " --jobs 1" : " --jobs 3")) == 0);
    REQUIRE(run_cli("pooled --config " + cfg + " --replications 20" + (name[0] == 'a' ? "" : " --jobs 3")) == 0);
  }
  const auto a = tree(dir / "a"), b = tree(dir / "b");
  CHECK(a.size() == b.size());
  for (const auto& [file, content] : a) {
    INFO(file);
    REQUIRE(b.count(file));
    CHECK(content == b.at(file));
  }
}

TEST_CASE("an invariant term fails its period by name") {
  const fs::path dir = scratch("identify");
  write(dir / "sim.yaml", kTwoRoles);
  const fs::path data = dir / "data";
  REQUIRE(run_cli("simulate --config " + (dir / "sim.yaml").string() + " --out " + data.string()) == 0);
  std::string cfg = read(data / "run.yaml");
  const auto pos = cfg.find("      - Regime Homophily\n");
  REQUIRE(pos != std::string::npos);
  cfg.insert(pos, "      - Offensive Commitments\n");
  write(data / "bad.yaml", cfg);
  std::ostringstream log;
  try {
    cmd_fit(load_run_config(data / "bad.yaml"), {}, log);
    FAIL("expected EstimationError");
  } catch (const EstimationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("Offensive Commitments") != std::string::npos);
    CHECK(msg.find("synthetic") != std::string::npos);
  }
  CHECK(run_cli("fit --config " + (data / "bad.yaml").string()) == 4);
  CHECK(run_cli("fit --config " + (data / "bad.yaml").string() + " --period nowhere") == 2);
  CHECK(run_cli("fit --config " + (dir / "missing.yaml").string()) == 2);
  CHECK(run_cli("pooled --config " + (data / "run.yaml").string() + " --out " + (dir / "empty").string()) == 3);
}

TEST_CASE("pooled tables skip empty roles and flag single-member roles") {
  const fs::path dir = scratch("pooled_roles");
  write(dir / "sim.yaml", kTwoRoles);
  const fs::path data = dir / "data";
  REQUIRE(run_cli("simulate --config " + (dir / "sim.yaml").string() + " --out " + data.string()) == 0);
  const RunConfig cfg = load_run_config(data / "run.yaml");
  fs::create_directories(data / "results");
  // Hand-written assignment: role 0 holds one ego, role 1 the rest, role 2 nobody.
  std::string roles = "ego_id,role_0,role_1,role_2,hard_label\n";
  const auto truth = read_csv(data / "truth.csv");
  for (std::size_t r = 1; r < truth.size(); ++r)
    roles += truth[r][0] + (r == 1 ? ",1,0,0,0\n" : ",0,1,0,1\n");
  write(data / "results" / "roles_synthetic.csv", roles);
  RunOverrides o;
  o.replications = 10;
  std::ostringstream log;
  cmd_pooled(cfg, o, log);
  CHECK(log.str().find("Role 2 has no members; skipped") != std::string::npos);
  const std::string table = read(data / "results" / "coefficients_synthetic.txt");
  CHECK(table.find("Role 0 (1 egos)") != std::string::npos);
  CHECK(table.find("low-N") != std::string::npos);
  CHECK_FALSE(fs::exists(data / "results" / "pooled_synthetic_role_2.csv"));
}
