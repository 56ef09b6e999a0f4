#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "egotergm/changestats.hpp"
#include "egotergm/netdata.hpp"

namespace egotergm {

struct FitOptions {
  int max_iterations = 100;
  double score_tolerance = 1e-8;
  double relative_tolerance = 1e-10;
  // Estimates beyond this magnitude are treated as (quasi-)separation.
  double coefficient_cap = 25.0;
  // Columns whose weighted residual norm after projection on earlier kept
  // columns falls below this fraction of their own norm are dropped.
  double rank_tolerance = 1e-10;
};

struct ParameterEstimate {
  std::vector<std::string> labels;  // estimated terms, in design order
  Eigen::VectorXd theta;
  std::vector<int> kept_columns;
  std::vector<std::string> dropped_terms;
  double log_pl = 0.0;
  bool converged = false;
  bool separation = false;
  int iterations = 0;
  std::string diagnostic;

  /// Coefficients in design-column order, 0 for dropped terms.
  Eigen::VectorXd full_theta(Eigen::Index columns) const;
};

/// Maximum pseudolikelihood: weighted logistic regression of tie indicators
/// on change statistics by Newton-Raphson (IRLS) with step halving.
/// `start`, if non-empty, is a full-length starting vector.
ParameterEstimate fit_mple(const DesignMatrix& design, std::span<const double> weights = {},
                           const FitOptions& options = {},
                           const Eigen::VectorXd& start = Eigen::VectorXd());

ParameterEstimate fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& w, std::span<const std::string> labels,
                               const FitOptions& options = {},
                               const Eigen::VectorXd& start = Eigen::VectorXd());

/// Weighted Bernoulli log-likelihood sum w*(y*eta - log(1 + e^eta)).
double logistic_log_lik(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w, const Eigen::VectorXd& theta);

/// log(1 + e^eta) without overflow.
inline double softplus(double eta) {
  return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

struct BootstrapOptions {
  int replications = 500;
  double confidence = 0.95;
  std::uint64_t seed = 0;
  int jobs = 1;
  // More than this fraction of failed replicates marks the result unstable.
  double unstable_fraction = 0.2;
  FitOptions fit;
};

enum class ResampleUnit { Year, Series };

struct BootstrapResult {
  ParameterEstimate point;
  Eigen::MatrixXd replicates;  // replications x |point.theta|, NaN rows = failed
  Eigen::VectorXd ci_low;
  Eigen::VectorXd ci_high;
  std::vector<bool> significant;  // 0 outside [ci_low, ci_high]
  double confidence = 0.95;
  int replications = 0;
  int missing = 0;
  bool unstable = false;
  Eigen::Index n_obs = 0;
  int n_units = 0;
  ResampleUnit unit = ResampleUnit::Year;

  int used() const { return replications - missing; }
};

/// Type-7 (linear interpolation) sample quantile; `values` must be non-empty.
double quantile(std::vector<double> values, double q);

/// Resamples whole years (or whole series) with replacement and refits.
/// Replicates draw from per-replicate seeded substreams, so results do not
/// depend on `jobs`.
BootstrapResult bootstrap_design(const DesignMatrix& design, ResampleUnit unit,
                                 const BootstrapOptions& options);

BootstrapResult bootstrap_tergm(const EgoSeries& series, const ModelSpec& spec,
                                const BootstrapOptions& options);
BootstrapResult bootstrap_tergm(const LongitudinalNetwork& net, const ModelSpec& spec,
                                const BootstrapOptions& options);

/// Pooled fit over all egos of one role; egos are the resampling unit.
BootstrapResult pooled_role_tergm(std::span<const EgoSeries> egos, const ModelSpec& spec,
                                  const BootstrapOptions& options);

// Table output.
std::string format_coefficient(double estimate, bool significant);  // "-5.95*"
std::string format_interval(double low, double high);               // "[-6.31; -5.63]"
/// "-5.95* [-6.31; -5.63]" for the term at `index` of the point estimate.
std::string format_estimate_cell(const BootstrapResult& result, std::size_t index);

struct NamedResult {
  std::string name;
  const BootstrapResult* result = nullptr;
  std::vector<std::string> notes;
};

/// Aligned plain-text coefficient table: one column per result, estimate
/// line with significance star and bracketed percentile interval line per
/// term, observation counts and the replication count in the footer.
std::string render_coefficient_table(std::span<const NamedResult> columns);

/// CSV: term,estimate,ci_low,ci_high,significant,n_obs,n_replicates_used
void write_coefficient_csv(const BootstrapResult& result, std::ostream& out);

}  // namespace egotergm
