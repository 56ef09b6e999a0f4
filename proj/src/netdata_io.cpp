#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "egotergm/errors.hpp"
#include "egotergm/netdata.hpp"

namespace egotergm {

namespace {

const std::vector<std::string> kDyadHeader = {
    "actor_a",       "actor_b", "year",
    "defensive",     "offensive", "neutrality",
    "nonaggression", "secret",  "institutionalization",
    "alliance_years"};
const std::vector<std::string> kNodeHeader = {"actor", "year", "polity", "cinc", "revisionist"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class FieldParser {
 public:
  FieldParser(const std::string& source, int line, const std::vector<std::string>& header)
      : source_(source), line_(line), header_(header) {}

  [[noreturn]] void fail(std::size_t col, const std::string& what) const {
    throw DataError(fmt::format("{}:{}: field '{}' {}", source_, line_, header_[col], what));
  }

  long parse_int(const std::string& s, std::size_t col) const {
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size())
      fail(col, fmt::format("is not an integer: '{}'", s));
    return v;
  }

  double parse_real(const std::string& s, std::size_t col) const {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
      fail(col, fmt::format("is not a number: '{}'", s));
    return v;
  }

  bool parse_bool(const std::string& s, std::size_t col) const {
    if (s == "0") return false;
    if (s == "1") return true;
    fail(col, fmt::format("must be 0 or 1, got '{}'", s));
  }

 private:
  const std::string& source_;
  int line_;
  const std::vector<std::string>& header_;
};

// Returns false on an empty stream. Validates the header row.
bool read_header(CsvReader& reader, const std::vector<std::string>& expected,
                 const std::string& source) {
  std::vector<std::string> fields;
  if (!reader.next(fields)) return false;
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
  for (auto& f : fields) f = trim(f);
  if (fields != expected) {
    std::string want;
    for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
    throw DataError(fmt::format("{}:{}: expected header '{}'", source, reader.line(), want));
  }
  return true;
}

bool is_blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path));
  return in;
}

}  // namespace

bool CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  if (!std::getline(in_, line)) return false;
  ++line_;
  std::string field;
  bool quoted = false;
  std::size_t k = 0;
  for (;;) {
    if (k == line.size()) {
      if (!quoted) break;
      // Quoted field spans a line break.
      std::string more;
      if (!std::getline(in_, more))
        throw DataError(fmt::format("line {}: unterminated quoted field", line_));
      ++line_;
      field += '\n';
      line = std::move(more);
      k = 0;
      continue;
    }
    const char c = line[k++];
    if (quoted) {
      if (c == '"') {
        if (k < line.size() && line[k] == '"') {
          field += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r' || k != line.size()) {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return true;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<DyadYearRecord> read_dyad_csv(std::istream& in, const std::string& source) {
  CsvReader reader(in);
  std::vector<DyadYearRecord> rows;
  if (!read_header(reader, kDyadHeader, source)) return rows;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (is_blank(f)) continue;
    if (f.size() != kDyadHeader.size())
      throw DataError(fmt::format("{}:{}: expected {} fields, found {}", source, reader.line(),
                                  kDyadHeader.size(), f.size()));
    for (auto& x : f) x = trim(x);
    FieldParser p(source, reader.line(), kDyadHeader);
    DyadYearRecord r;
    r.actor_a = f[0];
    r.actor_b = f[1];
    if (r.actor_a.empty()) p.fail(0, "is empty");
    if (r.actor_b.empty()) p.fail(1, "is empty");
    r.year = static_cast<int>(p.parse_int(f[2], 2));
    r.defensive = p.parse_bool(f[3], 3);
    r.offensive = p.parse_bool(f[4], 4);
    r.neutrality = p.parse_bool(f[5], 5);
    r.nonaggression = p.parse_bool(f[6], 6);
    r.secret = p.parse_bool(f[7], 7);
    r.institutionalization = p.parse_real(f[8], 8);
    if (r.institutionalization < 0) p.fail(8, "must be >= 0");
    const long ay = p.parse_int(f[9], 9);
    if (ay < 0) p.fail(9, "must be >= 0");
    r.alliance_years = static_cast<int>(ay);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<NodeYearAttrs> read_node_csv(std::istream& in, const std::string& source) {
  CsvReader reader(in);
  std::vector<NodeYearAttrs> rows;
  if (!read_header(reader, kNodeHeader, source)) return rows;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (is_blank(f)) continue;
    if (f.size() != kNodeHeader.size())
      throw DataError(fmt::format("{}:{}: expected {} fields, found {}", source, reader.line(),
                                  kNodeHeader.size(), f.size()));
    for (auto& x : f) x = trim(x);
    FieldParser p(source, reader.line(), kNodeHeader);
    NodeYearAttrs a;
    a.actor = f[0];
    if (a.actor.empty()) p.fail(0, "is empty");
    a.year = static_cast<int>(p.parse_int(f[1], 1));
    const long polity = p.parse_int(f[2], 2);
    if (polity < -10 || polity > 10) p.fail(2, fmt::format("must lie in [-10, 10], got {}", polity));
    a.regime_democracy = polity > 6;
    a.cinc = p.parse_real(f[3], 3);
    if (a.cinc < 0 || a.cinc > 1) p.fail(3, fmt::format("must lie in [0, 1], got {}", f[3]));
    a.revisionist = p.parse_bool(f[4], 4);
    rows.push_back(std::move(a));
  }
  return rows;
}

void write_dyad_csv(const LongitudinalNetwork& net, std::ostream& out) {
  for (std::size_t k = 0; k < kDyadHeader.size(); ++k) out << (k ? "," : "") << kDyadHeader[k];
  out << '\n';
  for (const auto& s : net.slices()) {
    for (const auto& [d, t] : s.ties) {
      out << fmt::format("{},{},{},{:d},{:d},{:d},{:d},{:d},{},{}\n", csv_escape(d.first),
                         csv_escape(d.second), s.year, t.defensive, t.offensive, t.neutrality,
                         t.nonaggression, t.secret, t.institutionalization, t.alliance_years);
    }
  }
}

void write_node_csv(const LongitudinalNetwork& net, std::ostream& out) {
  for (std::size_t k = 0; k < kNodeHeader.size(); ++k) out << (k ? "," : "") << kNodeHeader[k];
  out << '\n';
  for (const auto& s : net.slices()) {
    for (const auto& [actor, a] : s.nodes) {
      if (a.imputed) continue;
      out << fmt::format("{},{},{},{},{:d}\n", csv_escape(actor), s.year,
                         a.regime_democracy ? 10 : 0, a.cinc, a.revisionist);
    }
  }
}

std::vector<DyadYearRecord> read_dyad_csv_file(const std::string& path) {
  auto in = open_input(path);
  return read_dyad_csv(in, path);
}

std::vector<NodeYearAttrs> read_node_csv_file(const std::string& path) {
  auto in = open_input(path);
  return read_node_csv(in, path);
}

}  // namespace egotergm
