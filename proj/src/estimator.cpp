#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "egotergm/errors.hpp"
#include "egotergm/estimator.hpp"

namespace egotergm {

namespace {

double sigmoid(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// Greedy left-to-right column selection on the weighted Gram matrix: a
// column is kept when it is not (numerically) in the span of the columns
// already kept.
std::vector<int> independent_columns(const Eigen::MatrixXd& gram, double tolerance) {
  std::vector<int> kept;
  for (int k = 0; k < gram.cols(); ++k) {
    const double own = gram(k, k);
    if (!(own > 0) || !std::isfinite(own)) continue;
    if (kept.empty()) {
      kept.push_back(k);
      continue;
    }
    const auto m = static_cast<Eigen::Index>(kept.size());
    Eigen::MatrixXd ss(m, m);
    Eigen::VectorXd sk(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      sk(a) = gram(kept[static_cast<std::size_t>(a)], k);
      for (Eigen::Index b = 0; b < m; ++b)
        ss(a, b) = gram(kept[static_cast<std::size_t>(a)], kept[static_cast<std::size_t>(b)]);
    }
    const Eigen::VectorXd coef = ss.ldlt().solve(sk);
    const double residual = own - sk.dot(coef);
    if (residual > tolerance * own) kept.push_back(k);
  }
  return kept;
}

struct Evaluation {
  double log_lik = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;  // negative Hessian (information)
};

double log_lik_at(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                  const Eigen::VectorXd& theta) {
  const Eigen::VectorXd eta = x * theta;
  double ll = 0.0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    if (w(r) == 0) continue;
    ll += w(r) * (y(r) * eta(r) - softplus(eta(r)));
  }
  return ll;
}

Evaluation evaluate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                    const Eigen::VectorXd& theta) {
  Evaluation ev;
  const Eigen::VectorXd eta = x * theta;
  Eigen::VectorXd resid(x.rows());
  Eigen::VectorXd curvature(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double p = sigmoid(eta(r));
    resid(r) = w(r) * (y(r) - p);
    curvature(r) = w(r) * p * (1.0 - p);
    if (w(r) != 0) ev.log_lik += w(r) * (y(r) * eta(r) - softplus(eta(r)));
  }
  ev.gradient = x.transpose() * resid;
  ev.hessian = x.transpose() * (x.array().colwise() * curvature.array()).matrix();
  return ev;
}

Eigen::VectorXd newton_direction(const Eigen::MatrixXd& info, const Eigen::VectorXd& gradient) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  Eigen::VectorXd step = ldlt.solve(gradient);
  if (ldlt.info() == Eigen::Success && step.allFinite() && ldlt.isPositive()) return step;
  // Nearly singular information: damp the diagonal.
  const double ridge = 1e-8 * std::max(info.diagonal().maxCoeff(), 1.0);
  Eigen::MatrixXd damped = info;
  damped.diagonal().array() += ridge;
  step = damped.ldlt().solve(gradient);
  if (!step.allFinite()) step = gradient;
  return step;
}

}  // namespace

Eigen::VectorXd ParameterEstimate::full_theta(Eigen::Index columns) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(columns);
  for (std::size_t k = 0; k < kept_columns.size(); ++k)
    full(kept_columns[k]) = theta(static_cast<Eigen::Index>(k));
  return full;
}

double logistic_log_lik(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w, const Eigen::VectorXd& theta) {
  return log_lik_at(x, y, w, theta);
}

ParameterEstimate fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& w, std::span<const std::string> labels,
                               const FitOptions& options, const Eigen::VectorXd& start) {
  if (x.rows() == 0) throw EstimationError("cannot fit a design with no rows");
  if (y.size() != x.rows() || w.size() != x.rows())
    throw std::invalid_argument("fit_logistic: response/weight length mismatch");
  if (labels.size() != static_cast<std::size_t>(x.cols()))
    throw std::invalid_argument("fit_logistic: one label per column required");

  ParameterEstimate est;
  const Eigen::MatrixXd gram = x.transpose() * (x.array().colwise() * w.array()).matrix();
  est.kept_columns = independent_columns(gram, options.rank_tolerance);
  std::vector<bool> keep(static_cast<std::size_t>(x.cols()), false);
  for (int k : est.kept_columns) keep[static_cast<std::size_t>(k)] = true;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k])
      est.labels.push_back(labels[k]);
    else
      est.dropped_terms.push_back(labels[k]);
  }

  const double mass_one = w.dot(y);
  const double mass_zero = w.sum() - mass_one;
  if (est.kept_columns.empty()) {
    est.theta.resize(0);
    est.log_pl = log_lik_at(Eigen::MatrixXd(x.rows(), 0), y, w, Eigen::VectorXd(0));
    est.diagnostic = "no estimable terms (all columns dropped or zero weight)";
    return est;
  }

  const bool all_kept = est.kept_columns.size() == static_cast<std::size_t>(x.cols());
  Eigen::MatrixXd reduced;
  if (!all_kept) {
    reduced.resize(x.rows(), static_cast<Eigen::Index>(est.kept_columns.size()));
    for (std::size_t c = 0; c < est.kept_columns.size(); ++c)
      reduced.col(static_cast<Eigen::Index>(c)) = x.col(est.kept_columns[c]);
  }
  const Eigen::MatrixXd& xk = all_kept ? x : reduced;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(xk.cols());
  if (start.size() == x.cols()) {
    for (std::size_t k = 0; k < est.kept_columns.size(); ++k)
      theta(static_cast<Eigen::Index>(k)) = start(est.kept_columns[k]);
  }

  Evaluation ev = evaluate(xk, y, w, theta);
  bool one_class = !(mass_one > 0) || !(mass_zero > 0);
  // Far starting points can overshoot the cap transiently; separation shows
  // as iterates that stay beyond it.
  constexpr int kCapPatience = 5;
  int beyond_cap = 0;
  int polish = 0;  // Newton steps left after a stopping rule fired
  bool relative_done = false;
  for (int it = 0;; ++it) {
    if (!relative_done && ev.gradient.cwiseAbs().maxCoeff() < options.score_tolerance) {
      // A small score still leaves an error of score/information in theta.
      relative_done = true;
      polish = 1;
    }
    if (relative_done && polish == 0) {
      est.converged = true;
      break;
    }
    if (it == options.max_iterations) {
      est.diagnostic = fmt::format("iteration limit {} reached", options.max_iterations);
      break;
    }
    const Eigen::VectorXd step = newton_direction(ev.hessian, ev.gradient);
    double scale = 1.0;
    Eigen::VectorXd candidate;
    double candidate_ll = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int halvings = 0; halvings < 50; ++halvings, scale *= 0.5) {
      candidate = theta + scale * step;
      candidate_ll = log_lik_at(xk, y, w, candidate);
      if (std::isfinite(candidate_ll) && candidate_ll >= ev.log_lik) {
        accepted = true;
        break;
      }
      // At the optimum the log-PL is flat to rounding; the score still
      // decides whether the step helps.
      if (scale == 1.0 && std::isfinite(candidate_ll) &&
          candidate_ll >= ev.log_lik - 1e-12 * std::max(1.0, std::abs(ev.log_lik)) &&
          evaluate(xk, y, w, candidate).gradient.cwiseAbs().maxCoeff() <
              ev.gradient.cwiseAbs().maxCoeff()) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No representable ascent remains; this is the numerical optimum.
      est.converged = relative_done || ev.gradient.cwiseAbs().maxCoeff() <
                                           1e-6 * std::max(1.0, w.sum());
      if (!est.converged) est.diagnostic = "line search stalled";
      break;
    }
    ++est.iterations;
    const double previous = ev.log_lik;
    theta = candidate;
    ev = evaluate(xk, y, w, theta);
    if (relative_done) {
      --polish;
      continue;
    }
    beyond_cap = theta.cwiseAbs().maxCoeff() > options.coefficient_cap ? beyond_cap + 1 : 0;
    if (beyond_cap >= kCapPatience) break;
    const double change = std::abs(ev.log_lik - previous);
    if (change <= options.relative_tolerance * std::abs(previous)) {
      relative_done = true;
      polish = 2;
    }
  }
  Eigen::Index worst = 0;
  if (theta.size() > 0 && theta.cwiseAbs().maxCoeff(&worst) > options.coefficient_cap) {
    est.converged = false;
    est.separation = true;
    est.diagnostic = fmt::format("coefficient for '{}' exceeded magnitude {} (separation)",
                                 est.labels[static_cast<std::size_t>(worst)],
                                 options.coefficient_cap);
  }
  if (one_class) {
    est.converged = false;
    est.separation = true;
    est.diagnostic = fmt::format("all weighted responses are {}; the likelihood has no maximum",
                                 mass_one > 0 ? 1 : 0);
  }
  est.theta = theta;
  est.log_pl = ev.log_lik;
  return est;
}

ParameterEstimate fit_mple(const DesignMatrix& design, std::span<const double> weights,
                           const FitOptions& options, const Eigen::VectorXd& start) {
  if (design.rows() == 0) throw EstimationError("cannot fit a design with no rows");
  Eigen::VectorXd w;
  if (weights.empty()) {
    w = Eigen::VectorXd::Ones(design.rows());
  } else {
    if (weights.size() != static_cast<std::size_t>(design.rows()))
      throw std::invalid_argument("fit_mple: one weight per row required");
    w = Eigen::Map<const Eigen::VectorXd>(weights.data(), design.rows());
    for (Eigen::Index r = 0; r < w.size(); ++r)
      if (!(w(r) >= 0) || !std::isfinite(w(r)))
        throw std::invalid_argument("fit_mple: weights must be finite and non-negative");
  }
  return fit_logistic(design.x, design.y, w, design.labels, options, start);
}

}  // namespace egotergm
