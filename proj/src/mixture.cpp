#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "egotergm/errors.hpp"
#include "egotergm/mixture.hpp"
#include "egotergm/parallel.hpp"
#include "egotergm/random.hpp"

namespace egotergm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Standardized per-ego MPLE vectors, the k-means feature space.
Eigen::MatrixXd initial_features(const EgoPopulation& pop, const FitOptions& fit) {
  const DesignMatrix& all = pop.stacked();
  const Eigen::Index K = pop.terms();
  const Eigen::VectorXd pooled = fit_mple(all, {}, fit).full_theta(K);

  Eigen::MatrixXd features(static_cast<Eigen::Index>(pop.size()), K);
  for (std::size_t n = 0; n < pop.size(); ++n) {
    const Eigen::Index begin = pop.row_begin(n);
    const Eigen::Index rows = pop.row_count(n);
    const Eigen::MatrixXd x = all.x.middleRows(begin, rows);
    const Eigen::VectorXd y = all.y.segment(begin, rows);
    ParameterEstimate est =
        fit_logistic(x, y, Eigen::VectorXd::Ones(rows), all.labels, fit, pooled);
    Eigen::VectorXd v = pooled;
    if (est.converged)
      for (std::size_t k = 0; k < est.kept_columns.size(); ++k)
        v(est.kept_columns[k]) = est.theta(static_cast<Eigen::Index>(k));
    features.row(static_cast<Eigen::Index>(n)) = v.transpose();
  }
  for (Eigen::Index c = 0; c < K; ++c) {
    const double mean = features.col(c).mean();
    const double sd = std::sqrt((features.col(c).array() - mean).square().mean());
    if (sd > 0)
      features.col(c) = (features.col(c).array() - mean) / sd;
    else
      features.col(c).setZero();
  }
  return features;
}

Eigen::MatrixXd hard_responsibilities(const Eigen::MatrixXd& features, int G, std::uint64_t seed,
                                      int restarts) {
  const KMeansResult km = kmeans(features, G, seed, restarts);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(features.rows(), G);
  for (Eigen::Index n = 0; n < features.rows(); ++n) r(n, km.labels[static_cast<std::size_t>(n)]) = 1.0;
  return r;
}

void m_step(const EgoPopulation& pop, const Eigen::MatrixXd& resp, const MixtureOptions& options,
            std::vector<Eigen::VectorXd>& thetas, std::vector<double>& pis) {
  const DesignMatrix& all = pop.stacked();
  const auto N = static_cast<double>(pop.size());
  Eigen::VectorXd w(all.rows());
  for (Eigen::Index g = 0; g < resp.cols(); ++g) {
    const double mass = resp.col(g).sum();
    pis[static_cast<std::size_t>(g)] = mass / N;
    if (mass < options.degenerate_mass * N) continue;
    for (std::size_t n = 0; n < pop.size(); ++n)
      w.segment(pop.row_begin(n), pop.row_count(n)).setConstant(resp(static_cast<Eigen::Index>(n), g));
    ParameterEstimate est = fit_logistic(all.x, all.y, w, all.labels, options.fit,
                                         thetas[static_cast<std::size_t>(g)]);
    thetas[static_cast<std::size_t>(g)] = est.full_theta(pop.terms());
  }
}

}  // namespace

EgoPopulation::EgoPopulation(std::span<const EgoSeries> egos, const ModelSpec& spec) {
  std::vector<DesignMatrix> designs;
  designs.reserve(egos.size());
  for (const auto& ego : egos) {
    ids_.push_back(ego.ego_id);
    designs.push_back(design_matrix(ego, spec));
  }
  finish(designs);
}

EgoPopulation::EgoPopulation(std::vector<std::string> ids, std::span<const DesignMatrix> designs)
    : ids_(std::move(ids)) {
  if (ids_.size() != designs.size())
    throw std::invalid_argument("EgoPopulation: one id per design required");
  finish(designs);
}

void EgoPopulation::finish(std::span<const DesignMatrix> designs) {
  if (designs.empty()) throw EstimationError("no ego networks to cluster");
  offsets_.assign(1, 0);
  for (std::size_t n = 0; n < designs.size(); ++n) {
    if (designs[n].rows() == 0)
      throw DataError(fmt::format("ego '{}' has no dyads among its alters", ids_[n]));
    offsets_.push_back(offsets_.back() + designs[n].rows());
  }
  stacked_ = concat_designs(designs);
  if (!stacked_.constant_terms.empty())
    throw EstimationError(fmt::format(
        "term '{}' does not vary across any ego network and cannot be identified",
        stacked_.constant_terms.front()));
}

Eigen::VectorXd EgoPopulation::ego_log_pl(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd eta = stacked_.x * theta;
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  for (std::size_t n = 0; n < size(); ++n) {
    double s = 0.0;
    for (Eigen::Index r = offsets_[n]; r < offsets_[n + 1]; ++r)
      s += stacked_.y(r) * eta(r) - softplus(eta(r));
    out(static_cast<Eigen::Index>(n)) = s;
  }
  return out;
}

double mixture_bic(double log_pl, int G, Eigen::Index K, std::size_t N) {
  const double free = static_cast<double>(G) * static_cast<double>(K) + (G - 1);
  return -2.0 * log_pl + free * std::log(static_cast<double>(N));
}

MixtureState evaluate_mixture(const EgoPopulation& pop, std::span<const Eigen::VectorXd> thetas,
                              std::span<const double> pis) {
  const auto N = static_cast<Eigen::Index>(pop.size());
  const auto G = static_cast<Eigen::Index>(thetas.size());
  Eigen::MatrixXd logw(N, G);
  for (Eigen::Index g = 0; g < G; ++g) {
    const double pi = pis[static_cast<std::size_t>(g)];
    if (pi > 0)
      logw.col(g) = pop.ego_log_pl(thetas[static_cast<std::size_t>(g)]).array() + std::log(pi);
    else
      logw.col(g).setConstant(kNegInf);
  }
  MixtureState state;
  state.responsibilities.resize(N, G);
  for (Eigen::Index n = 0; n < N; ++n) {
    const double top = logw.row(n).maxCoeff();
    double total = 0.0;
    for (Eigen::Index g = 0; g < G; ++g) {
      const double e = logw(n, g) == kNegInf ? 0.0 : std::exp(logw(n, g) - top);
      state.responsibilities(n, g) = e;
      total += e;
    }
    state.responsibilities.row(n) /= total;
    state.log_pl += top + std::log(total);
  }
  return state;
}

Eigen::MatrixXd initialize(const EgoPopulation& pop, int G, std::uint64_t seed,
                           int kmeans_restarts, const FitOptions& fit) {
  if (G < 1 || static_cast<std::size_t>(G) > pop.size())
    throw EstimationError(fmt::format("cannot fit {} roles to {} egos", G, pop.size()));
  return hard_responsibilities(initial_features(pop, fit), G, seed, kmeans_restarts);
}

MixtureFit fit_ego_tergm_from(const EgoPopulation& pop, const Eigen::MatrixXd& initial,
                              const MixtureOptions& options) {
  const int G = static_cast<int>(initial.cols());
  const Eigen::Index K = pop.terms();
  if (G < 1 || static_cast<std::size_t>(G) > pop.size())
    throw EstimationError(fmt::format("cannot fit {} roles to {} egos", G, pop.size()));

  MixtureFit fit;
  fit.G = G;
  fit.ego_ids = pop.ids();
  fit.labels = pop.labels();
  for (std::size_t n = 0; n < pop.size(); ++n) fit.ego_rows.push_back(pop.row_count(n));

  const Eigen::VectorXd pooled = fit_mple(pop.stacked(), {}, options.fit).full_theta(K);
  fit.thetas.assign(static_cast<std::size_t>(G), pooled);
  fit.pis.assign(static_cast<std::size_t>(G), 0.0);
  m_step(pop, initial, options, fit.thetas, fit.pis);

  double previous = kNegInf;
  MixtureState state;
  for (int it = 1;; ++it) {
    state = evaluate_mixture(pop, fit.thetas, fit.pis);
    fit.trace.push_back(state.log_pl);
    fit.iterations = it;
    if (it > 1 && std::abs(state.log_pl - previous) < options.tolerance) {
      fit.converged = true;
      break;
    }
    if (it == options.max_iterations) break;
    previous = state.log_pl;
    m_step(pop, state.responsibilities, options, fit.thetas, fit.pis);
  }
  fit.responsibilities = std::move(state.responsibilities);
  fit.log_pl = state.log_pl;
  fit.bic = mixture_bic(fit.log_pl, G, K, pop.size());

  const auto N = static_cast<double>(pop.size());
  for (int g = 0; g < G; ++g) {
    const double mass = fit.responsibilities.col(g).sum();
    if (mass < options.degenerate_mass * N) {
      fit.degenerate_roles.push_back(g);
      fit.warnings.push_back(fmt::format(
          "role {} is degenerate: total assignment probability {:.3g} across {} egos", g, mass,
          pop.size()));
    }
  }
  if (!fit.converged)
    fit.warnings.push_back(fmt::format("EM stopped after {} iterations without converging",
                                       fit.iterations));
  return fit;
}

MixtureFit fit_ego_tergm(const EgoPopulation& pop, int G, std::uint64_t seed,
                         const MixtureOptions& options) {
  return fit_ego_tergm_from(pop, initialize(pop, G, seed, options.kmeans_restarts, options.fit),
                            options);
}

RoleSelection select_roles(const EgoPopulation& pop, int g_min, int g_max, int cap,
                           std::uint64_t seed, const MixtureOptions& options) {
  const int lo = std::max(g_min, 1);
  const int hi = std::min({g_max, cap, static_cast<int>(pop.size())});
  if (lo > hi)
    throw EstimationError(fmt::format(
        "no feasible role count: requested {}-{}, cap {}, {} egos", g_min, g_max, cap, pop.size()));

  const Eigen::MatrixXd features = initial_features(pop, options.fit);
  RoleSelection out;
  out.fits.resize(static_cast<std::size_t>(hi - lo + 1));
  parallel_for(out.fits.size(), options.jobs, [&](std::size_t k) {
    const int G = lo + static_cast<int>(k);
    const int restarts = G == 1 ? 1 : std::max(options.restarts, 1);
    MixtureFit best;
    bool have = false;
    for (int r = 0; r < restarts; ++r) {
      const std::uint64_t s = stream_seed(seed, {static_cast<std::uint64_t>(G), static_cast<std::uint64_t>(r)});
      // The first restart uses the full k-means search; later ones use a
      // single k-means++ run for diversity.
      const Eigen::MatrixXd init =
          hard_responsibilities(features, G, s, r == 0 ? options.kmeans_restarts : 1);
      MixtureFit fit = fit_ego_tergm_from(pop, init, options);
      if (!have || fit.log_pl > best.log_pl) {
        best = std::move(fit);
        have = true;
      }
    }
    out.fits[k] = std::move(best);
  });

  std::size_t chosen = 0;
  for (std::size_t k = 1; k < out.fits.size(); ++k)
    if (out.fits[k].bic < out.fits[chosen].bic) chosen = k;
  out.best = out.fits[chosen];
  return out;
}

RoleAssignment assignment_matrix(const MixtureFit& fit) {
  RoleAssignment out;
  out.ego_ids = fit.ego_ids;
  out.matrix = fit.responsibilities;
  for (int g = 0; g < fit.G; ++g) out.role_labels.push_back(fmt::format("role_{}", g));
  for (Eigen::Index n = 0; n < out.matrix.rows(); ++n) {
    int best = 0;
    for (int g = 1; g < fit.G; ++g)
      if (out.matrix(n, g) > out.matrix(n, best)) best = g;
    out.hard_labels.push_back(best);
  }
  return out;
}

}  // namespace egotergm
