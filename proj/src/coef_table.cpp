#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "egotergm/estimator.hpp"

namespace egotergm {

namespace {

std::string two_decimals(double v) {
  if (std::isnan(v)) return "NA";
  std::string s = fmt::format("{:.2f}", v);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string csv_number(double v) { return std::isnan(v) ? "NA" : fmt::format("{}", v); }

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string format_coefficient(double estimate, bool significant) {
  return two_decimals(estimate) + (significant ? "*" : "");
}

std::string format_interval(double low, double high) {
  return fmt::format("[{}; {}]", two_decimals(low), two_decimals(high));
}

std::string format_estimate_cell(const BootstrapResult& result, std::size_t index) {
  const auto i = static_cast<Eigen::Index>(index);
  return format_coefficient(result.point.theta(i), result.significant[index]) + " " +
         format_interval(result.ci_low(i), result.ci_high(i));
}

std::string render_coefficient_table(std::span<const NamedResult> columns) {
  std::vector<std::string> terms;
  for (const auto& c : columns)
    for (const auto& label : c.result->point.labels)
      if (std::find(terms.begin(), terms.end(), label) == terms.end()) terms.push_back(label);

  // cells[row][col]; two rows per term.
  std::vector<std::string> row_labels;
  std::vector<std::vector<std::string>> cells;
  for (const auto& term : terms) {
    std::vector<std::string> est_row, ci_row;
    for (const auto& c : columns) {
      const auto& labels = c.result->point.labels;
      auto it = std::find(labels.begin(), labels.end(), term);
      if (it == labels.end()) {
        est_row.emplace_back();
        ci_row.emplace_back();
        continue;
      }
      const auto k = static_cast<std::size_t>(it - labels.begin());
      const auto i = static_cast<Eigen::Index>(k);
      est_row.push_back(format_coefficient(c.result->point.theta(i), c.result->significant[k]));
      ci_row.push_back(format_interval(c.result->ci_low(i), c.result->ci_high(i)));
    }
    row_labels.push_back(term);
    cells.push_back(std::move(est_row));
    row_labels.emplace_back();
    cells.push_back(std::move(ci_row));
  }
  std::vector<std::string> obs_row;
  for (const auto& c : columns) obs_row.push_back(fmt::format("{}", c.result->n_obs));

  std::size_t label_width = std::string("Num. obs.").size();
  for (const auto& t : terms) label_width = std::max(label_width, t.size());
  label_width += 2;
  std::vector<std::size_t> widths;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::size_t w = std::max(columns[c].name.size(), obs_row[c].size());
    for (const auto& row : cells) w = std::max(w, row[c].size());
    widths.push_back(w + 3);
  }
  std::size_t total = label_width;
  for (auto w : widths) total += w;
  const std::string rule(total, '-');

  auto line = [&](const std::string& label, const std::vector<std::string>& row) {
    std::string s = pad(label, label_width);
    for (std::size_t c = 0; c < row.size(); ++c) s += pad(row[c], widths[c]);
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s + "\n";
  };

  std::vector<std::string> header;
  for (const auto& c : columns) header.push_back(c.name);
  std::string out = rule + "\n" + line("", header) + rule + "\n";
  for (std::size_t r = 0; r < cells.size(); ++r) out += line(row_labels[r], cells[r]);
  out += rule + "\n" + line("Num. obs.", obs_row) + rule + "\n";

  const double confidence = columns.empty() ? 0.95 : columns.front().result->confidence;
  out += fmt::format("* 0 outside the {:g}% bootstrapped confidence interval\n", confidence * 100.0);
  std::vector<int> reps;
  for (const auto& c : columns) reps.push_back(c.result->replications);
  if (!reps.empty() && std::all_of(reps.begin(), reps.end(), [&](int r) { return r == reps[0]; })) {
    out += fmt::format("{} replications\n", reps[0]);
  } else {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out += fmt::format("{}: {} replications\n", columns[c].name, reps[c]);
  }
  for (const auto& c : columns) {
    const BootstrapResult& r = *c.result;
    if (r.missing > 0)
      out += fmt::format("{}: {} of {} replications used{}\n", c.name, r.used(), r.replications,
                         r.unstable ? " (unstable)" : "");
    if (!r.point.converged)
      out += fmt::format("{}: point estimate did not converge: {}\n", c.name, r.point.diagnostic);
    if (!r.point.dropped_terms.empty()) {
      std::string dropped;
      for (const auto& d : r.point.dropped_terms) dropped += (dropped.empty() ? "" : ", ") + d;
      out += fmt::format("{}: dropped for collinearity: {}\n", c.name, dropped);
    }
    for (const auto& note : c.notes) out += fmt::format("{}: {}\n", c.name, note);
  }
  return out;
}

void write_coefficient_csv(const BootstrapResult& result, std::ostream& out) {
  out << "term,estimate,ci_low,ci_high,significant,n_obs,n_replicates_used\n";
  for (std::size_t k = 0; k < result.point.labels.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out << fmt::format("{},{},{},{},{:d},{},{}\n", csv_escape(result.point.labels[k]),
                       csv_number(result.point.theta(i)), csv_number(result.ci_low(i)),
                       csv_number(result.ci_high(i)), result.significant[k], result.n_obs,
                       result.used());
  }
}

}  // namespace egotergm
