#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "egotergm/errors.hpp"
#include "egotergm/estimator.hpp"
#include "egotergm/parallel.hpp"
#include "egotergm/random.hpp"

namespace egotergm {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BootstrapResult bootstrap_design(const DesignMatrix& design, ResampleUnit unit,
                                 const BootstrapOptions& options) {
  if (options.replications < 1) throw ConfigError("bootstrap needs at least one replication");
  if (!(options.confidence > 0 && options.confidence < 1))
    throw ConfigError(fmt::format("confidence {} outside (0, 1)", options.confidence));

  std::vector<int> row_block(static_cast<std::size_t>(design.rows()));
  std::size_t blocks = 0;
  if (unit == ResampleUnit::Year) {
    std::map<int, int> index;
    for (int y : design.slice_years) index.emplace(y, static_cast<int>(index.size()));
    blocks = index.size();
    if (blocks < 2)
      throw EstimationError(fmt::format(
          "time-slice bootstrap needs at least two slices, got {}", blocks));
    for (std::size_t r = 0; r < row_block.size(); ++r) row_block[r] = index.at(design.row_year[r]);
  } else {
    blocks = static_cast<std::size_t>(design.units);
    if (blocks < 1) throw EstimationError("pooled bootstrap needs at least one series");
    row_block.assign(design.row_unit.begin(), design.row_unit.end());
  }

  BootstrapResult out;
  out.confidence = options.confidence;
  out.replications = options.replications;
  out.n_obs = design.rows();
  out.n_units = static_cast<int>(blocks);
  out.unit = unit;
  out.point = fit_mple(design, {}, options.fit);

  const Eigen::VectorXd start = out.point.full_theta(design.cols());
  const auto p = out.point.theta.size();
  out.replicates = Eigen::MatrixXd::Constant(options.replications, p,
                                             std::numeric_limits<double>::quiet_NaN());

  parallel_for(static_cast<std::size_t>(options.replications), options.jobs, [&](std::size_t r) {
    Rng rng = make_rng(options.seed, {0x626f6f74ULL, r});
    std::vector<double> counts(blocks, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) counts[uniform_index(rng, blocks)] += 1.0;
    Eigen::VectorXd w(design.rows());
    for (Eigen::Index row = 0; row < design.rows(); ++row)
      w(row) = counts[static_cast<std::size_t>(row_block[static_cast<std::size_t>(row)])];
    ParameterEstimate rep = fit_logistic(design.x, design.y, w, design.labels, options.fit, start);
    if (rep.converged && rep.kept_columns == out.point.kept_columns)
      out.replicates.row(static_cast<Eigen::Index>(r)) = rep.theta.transpose();
  });

  for (Eigen::Index r = 0; r < out.replicates.rows(); ++r)
    if (out.replicates.row(r).hasNaN()) ++out.missing;
  out.unstable = out.missing > options.unstable_fraction * options.replications;

  const double lower_q = (1.0 - options.confidence) / 2.0;
  const double upper_q = (1.0 + options.confidence) / 2.0;
  out.ci_low.resize(p);
  out.ci_high.resize(p);
  out.significant.assign(static_cast<std::size_t>(p), false);
  for (Eigen::Index c = 0; c < p; ++c) {
    std::vector<double> column;
    for (Eigen::Index r = 0; r < out.replicates.rows(); ++r)
      if (!out.replicates.row(r).hasNaN()) column.push_back(out.replicates(r, c));
    if (column.empty()) {
      out.ci_low(c) = out.ci_high(c) = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    out.ci_low(c) = quantile(column, lower_q);
    out.ci_high(c) = quantile(column, upper_q);
    out.significant[static_cast<std::size_t>(c)] = out.ci_low(c) > 0 || out.ci_high(c) < 0;
  }
  return out;
}

BootstrapResult bootstrap_tergm(const EgoSeries& series, const ModelSpec& spec,
                                const BootstrapOptions& options) {
  if (series.slices.size() < 2)
    throw EstimationError(fmt::format("ego '{}' has fewer than two time slices", series.ego_id));
  return bootstrap_design(design_matrix(series, spec), ResampleUnit::Year, options);
}

BootstrapResult bootstrap_tergm(const LongitudinalNetwork& net, const ModelSpec& spec,
                                const BootstrapOptions& options) {
  if (net.size() < 2) throw EstimationError("network has fewer than two time slices");
  return bootstrap_design(design_matrix(net, spec), ResampleUnit::Year, options);
}

BootstrapResult pooled_role_tergm(std::span<const EgoSeries> egos, const ModelSpec& spec,
                                  const BootstrapOptions& options) {
  if (egos.empty()) throw EstimationError("pooled fit needs at least one ego");
  std::vector<DesignMatrix> parts;
  parts.reserve(egos.size());
  for (const auto& ego : egos) parts.push_back(design_matrix(ego, spec));
  return bootstrap_design(concat_designs(parts), ResampleUnit::Series, options);
}

}  // namespace egotergm
