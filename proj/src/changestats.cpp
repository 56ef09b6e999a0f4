#include "egotergm/changestats.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "egotergm/errors.hpp"

namespace egotergm {

namespace {

double choose(int n, int k) {
  if (k < 0 || n < k) return 0.0;
  double r = 1.0;
  for (int m = 1; m <= k; ++m) r = r * (n - k + m) / m;
  return r;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& s, std::string_view text) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    throw ConfigError(fmt::format("term '{}': '{}' is not a number", text, s));
  return v;
}

// Descriptive labels for the attribute terms used on alliance data. The
// first entry for a (kind, attr) pair is its default label.
struct NamedAttrTerm {
  const char* key;
  const char* label;
  TermKind kind;
  const char* attr;
};

constexpr NamedAttrTerm kNamedTerms[] = {
    {"regime homophily", "Regime Homophily", TermKind::NodeMatch, attr::kRegime},
    {"cinc difference", "CINC Difference", TermKind::AbsDiff, attr::kCinc},
    {"revisionist difference", "Revisionist Difference", TermKind::AbsDiff, attr::kRevisionist},
    {"revisionism difference", "Revisionism Difference", TermKind::AbsDiff, attr::kRevisionist},
    {"defensive commitments", "Defensive Commitments", TermKind::EdgeCov, attr::kDefensive},
    {"offensive commitments", "Offensive Commitments", TermKind::EdgeCov, attr::kOffensive},
    {"neutrality commitments", "Neutrality Commitments", TermKind::EdgeCov, attr::kNeutrality},
    {"non-aggression commitments", "Non-Aggression Commitments", TermKind::EdgeCov,
     attr::kNonaggression},
    {"secret provisions", "Secret Provisions", TermKind::EdgeCov, attr::kSecret},
    {"degree of institutionalization", "Degree of Institutionalization", TermKind::EdgeCov,
     attr::kInstitutionalization},
    {"alliance years", "Alliance Years", TermKind::EdgeCov, attr::kAllianceYears},
};

std::string default_attr_label(TermKind kind, const std::string& attr) {
  for (const auto& n : kNamedTerms)
    if (n.kind == kind && attr == n.attr) return n.label;
  switch (kind) {
    case TermKind::NodeMatch: return fmt::format("nodematch({})", attr);
    case TermKind::AbsDiff: return fmt::format("absdiff({})", attr);
    default: return fmt::format("edgecov({})", attr);
  }
}

const std::vector<double>* require_attr(const TermSpec& term, const Graph& g) {
  const bool node_level = term.kind == TermKind::NodeMatch || term.kind == TermKind::AbsDiff;
  const std::vector<double>* values = node_level ? g.node_attr(term.attr) : g.dyad_attr(term.attr);
  if (values == nullptr)
    throw DataError(fmt::format("term '{}' needs {} attribute '{}', which the graph lacks",
                                term.label, node_level ? "node" : "dyad", term.attr));
  const int n = g.size();
  for (std::size_t k = 0; k < values->size(); ++k) {
    if (std::isfinite((*values)[k])) continue;
    if (node_level)
      throw DataError(fmt::format("term '{}': attribute '{}' missing for node {}", term.label,
                                  term.attr, k));
    throw DataError(fmt::format("term '{}': attribute '{}' missing for dyad ({}, {})", term.label,
                                term.attr, k / static_cast<std::size_t>(n),
                                k % static_cast<std::size_t>(n)));
  }
  return values;
}

bool needs_attr(TermKind k) {
  return k == TermKind::NodeMatch || k == TermKind::AbsDiff || k == TermKind::EdgeCov;
}

double altkstar_ratio(double lambda) { return 1.0 - 1.0 / lambda; }
double gwdegree_ratio(double decay) { return 1.0 - std::exp(-decay); }

}  // namespace

bool TermSpec::integer_valued() const {
  switch (kind) {
    case TermKind::Edges:
    case TermKind::KStar:
    case TermKind::Triangles:
    case TermKind::NodeMatch: return true;
    default: return false;
  }
}

TermSpec edges_term() { return {TermKind::Edges, 0.0, {}, "Edges"}; }

TermSpec kstar_term(int k) {
  if (k < 2) throw ConfigError(fmt::format("k-star order must be at least 2, got {}", k));
  return {TermKind::KStar, static_cast<double>(k), {}, fmt::format("K-Stars ({})", k)};
}

TermSpec altkstar_term(double lambda) {
  if (!(lambda > 0) || !std::isfinite(lambda))
    throw ConfigError(fmt::format("alternating k-star lambda must be positive, got {}", lambda));
  return {TermKind::AltKStar, lambda, {}, fmt::format("Alternating K-Stars ({})", lambda)};
}

TermSpec gwdegree_term(double decay) {
  if (!(decay >= 0) || !std::isfinite(decay))
    throw ConfigError(fmt::format("GW degree decay must be non-negative, got {}", decay));
  return {TermKind::GWDegree, decay, {}, fmt::format("GW Degree ({})", decay)};
}

TermSpec triangles_term() { return {TermKind::Triangles, 0.0, {}, "Triangles"}; }

TermSpec nodematch_term(std::string a, std::string label) {
  if (label.empty()) label = default_attr_label(TermKind::NodeMatch, a);
  return {TermKind::NodeMatch, 0.0, std::move(a), std::move(label)};
}

TermSpec absdiff_term(std::string a, std::string label) {
  if (label.empty()) label = default_attr_label(TermKind::AbsDiff, a);
  return {TermKind::AbsDiff, 0.0, std::move(a), std::move(label)};
}

TermSpec edgecov_term(std::string a, std::string label) {
  if (label.empty()) label = default_attr_label(TermKind::EdgeCov, a);
  return {TermKind::EdgeCov, 0.0, std::move(a), std::move(label)};
}

TermSpec parse_term(std::string_view text) {
  const std::string cleaned = trim(text);
  std::string name = cleaned;
  std::string arg;
  bool has_arg = false;
  if (const auto open = cleaned.find('('); open != std::string::npos) {
    const auto close = cleaned.rfind(')');
    if (close == std::string::npos || close < open || close + 1 != cleaned.size())
      throw ConfigError(fmt::format("term '{}': unbalanced parentheses", text));
    name = trim(cleaned.substr(0, open));
    arg = trim(cleaned.substr(open + 1, close - open - 1));
    has_arg = true;
  }
  const std::string key = lower(name);
  auto need_arg = [&] {
    if (!has_arg || arg.empty()) throw ConfigError(fmt::format("term '{}' needs a parameter", text));
  };
  auto no_arg = [&] {
    if (has_arg) throw ConfigError(fmt::format("term '{}' takes no parameter", text));
  };

  if (key == "edges") {
    no_arg();
    return edges_term();
  }
  if (key == "triangles" || key == "triangle") {
    no_arg();
    return triangles_term();
  }
  if (key == "kstar" || key == "k-stars" || key == "k-star") {
    need_arg();
    const double k = parse_number(arg, text);
    if (k != std::floor(k)) throw ConfigError(fmt::format("term '{}': k must be an integer", text));
    return kstar_term(static_cast<int>(k));
  }
  if (key == "altkstar" || key == "alternating k-stars" || key == "alternating k-star") {
    need_arg();
    return altkstar_term(parse_number(arg, text));
  }
  if (key == "gwdegree" || key == "gw degree") {
    need_arg();
    return gwdegree_term(parse_number(arg, text));
  }
  if (key == "nodematch" || key == "absdiff" || key == "edgecov") {
    need_arg();
    if (key == "nodematch") return nodematch_term(arg);
    if (key == "absdiff") return absdiff_term(arg);
    return edgecov_term(arg);
  }
  for (const auto& n : kNamedTerms) {
    if (key == n.key) {
      no_arg();
      return {n.kind, 0.0, n.attr, n.label};
    }
  }
  throw ConfigError(fmt::format("unknown model term '{}'", text));
}

ModelSpec::ModelSpec(std::vector<TermSpec> t) : terms(std::move(t)) {
  std::set<std::string> seen;
  for (const auto& term : terms)
    if (!seen.insert(term.label).second)
      throw ConfigError(fmt::format("duplicate term label '{}'", term.label));
}

ModelSpec ModelSpec::parse(std::span<const std::string> texts) {
  std::vector<TermSpec> terms;
  for (const auto& t : texts) terms.push_back(parse_term(t));
  return ModelSpec(std::move(terms));
}

std::vector<std::string> ModelSpec::labels() const {
  std::vector<std::string> out;
  for (const auto& t : terms) out.push_back(t.label);
  return out;
}

double global_stat(const TermSpec& term, const Graph& g) {
  const int n = g.size();
  const std::vector<double>* values = needs_attr(term.kind) ? require_attr(term, g) : nullptr;
  double s = 0.0;
  switch (term.kind) {
    case TermKind::Edges: return g.edge_count();
    case TermKind::KStar:
      for (int i = 0; i < n; ++i) s += choose(g.degree(i), static_cast<int>(term.param));
      return s;
    case TermKind::AltKStar: {
      const double lambda = term.param;
      const double r = altkstar_ratio(lambda);
      for (int i = 0; i < n; ++i) {
        const int d = g.degree(i);
        s += lambda * lambda * (std::pow(r, d) - 1.0 + d / lambda);
      }
      return s;
    }
    case TermKind::GWDegree: {
      const double q = gwdegree_ratio(term.param);
      const double scale = std::exp(term.param);
      for (int i = 0; i < n; ++i) s += scale * (1.0 - std::pow(q, g.degree(i)));
      return s;
    }
    case TermKind::Triangles:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (g.has_edge(i, j)) s += g.common_neighbors(i, j);
      return s / 3.0;
    case TermKind::NodeMatch:
    case TermKind::AbsDiff:
    case TermKind::EdgeCov:
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (!g.has_edge(i, j)) continue;
          if (term.kind == TermKind::NodeMatch)
            s += (*values)[static_cast<std::size_t>(i)] == (*values)[static_cast<std::size_t>(j)];
          else if (term.kind == TermKind::AbsDiff)
            s += std::abs((*values)[static_cast<std::size_t>(i)] - (*values)[static_cast<std::size_t>(j)]);
          else
            s += (*values)[g.index(i, j)];
        }
      }
      return s;
  }
  return s;
}

double change_stat(const TermSpec& term, const Graph& graph, int i, int j) {
  if (i == j) throw std::invalid_argument("change_stat: dyad endpoints must differ");
  ModelSpec single;
  single.terms.push_back(term);
  ChangeStatEvaluator eval(single, graph);
  return eval.compute_term(0, i, j);
}

ChangeStatEvaluator::ChangeStatEvaluator(const ModelSpec& spec, const Graph& graph)
    : spec_(spec), graph_(graph), bound_(spec.size(), nullptr), power_tables_(spec.size()) {
  const int n = graph.size();
  for (std::size_t t = 0; t < spec.size(); ++t) {
    const TermSpec& term = spec.terms[t];
    if (needs_attr(term.kind)) bound_[t] = require_attr(term, graph);
    if (term.kind == TermKind::AltKStar || term.kind == TermKind::GWDegree) {
      const double r = term.kind == TermKind::AltKStar ? altkstar_ratio(term.param)
                                                        : gwdegree_ratio(term.param);
      auto& table = power_tables_[t];
      table.resize(static_cast<std::size_t>(std::max(n, 1)));
      for (int d = 0; d < std::max(n, 1); ++d) table[static_cast<std::size_t>(d)] = std::pow(r, d);
    }
  }
}

double ChangeStatEvaluator::compute_term(std::size_t t, int i, int j) const {
  const TermSpec& term = spec_.terms[t];
  const int tied = graph_.has_edge(i, j) ? 1 : 0;
  const auto di = static_cast<std::size_t>(graph_.degree(i) - tied);
  const auto dj = static_cast<std::size_t>(graph_.degree(j) - tied);
  const auto ui = static_cast<std::size_t>(i);
  const auto uj = static_cast<std::size_t>(j);
  switch (term.kind) {
    case TermKind::Edges: return 1.0;
    case TermKind::KStar: {
      const int k = static_cast<int>(term.param);
      return choose(static_cast<int>(di), k - 1) + choose(static_cast<int>(dj), k - 1);
    }
    case TermKind::AltKStar: {
      const auto& p = power_tables_[t];
      return term.param * ((1.0 - p[di]) + (1.0 - p[dj]));
    }
    case TermKind::GWDegree: {
      const auto& p = power_tables_[t];
      return p[di] + p[dj];
    }
    case TermKind::Triangles: return graph_.common_neighbors(i, j);
    case TermKind::NodeMatch: return (*bound_[t])[ui] == (*bound_[t])[uj] ? 1.0 : 0.0;
    case TermKind::AbsDiff: return std::abs((*bound_[t])[ui] - (*bound_[t])[uj]);
    case TermKind::EdgeCov: return (*bound_[t])[graph_.index(i, j)];
  }
  return 0.0;
}

void ChangeStatEvaluator::compute(int i, int j, std::span<double> out) const {
  for (std::size_t t = 0; t < spec_.size(); ++t) out[t] = compute_term(t, i, j);
}

}  // namespace egotergm
