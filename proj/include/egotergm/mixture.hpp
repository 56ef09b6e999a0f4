#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "egotergm/changestats.hpp"
#include "egotergm/estimator.hpp"
#include "egotergm/netdata.hpp"

namespace egotergm {

/// The clustering units: every ego's design matrix stacked into one, with
/// row ranges per ego. Construction rejects terms that are constant over
/// every ego (they are not identifiable) and egos without dyads.
class EgoPopulation {
 public:
  EgoPopulation(std::span<const EgoSeries> egos, const ModelSpec& spec);
  EgoPopulation(std::vector<std::string> ids, std::span<const DesignMatrix> designs);

  std::size_t size() const { return ids_.size(); }
  Eigen::Index terms() const { return stacked_.cols(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::string>& labels() const { return stacked_.labels; }
  const DesignMatrix& stacked() const { return stacked_; }
  Eigen::Index row_begin(std::size_t ego) const { return offsets_[ego]; }
  Eigen::Index row_count(std::size_t ego) const { return offsets_[ego + 1] - offsets_[ego]; }

  /// Per-ego log-pseudolikelihood under theta (length = terms()).
  Eigen::VectorXd ego_log_pl(const Eigen::VectorXd& theta) const;

 private:
  void finish(std::span<const DesignMatrix> designs);

  std::vector<std::string> ids_;
  DesignMatrix stacked_;
  std::vector<Eigen::Index> offsets_;
};

struct MixtureOptions {
  int max_iterations = 300;
  double tolerance = 1e-6;         // absolute change in mixture log-PL
  int restarts = 3;                // EM restarts per G in select_roles
  int kmeans_restarts = 10;
  double degenerate_mass = 1e-6;   // per ego
  int jobs = 1;
  FitOptions fit;
};

struct MixtureFit {
  int G = 1;
  std::vector<std::string> ego_ids;
  std::vector<std::string> labels;
  std::vector<Eigen::VectorXd> thetas;
  std::vector<double> pis;
  Eigen::MatrixXd responsibilities;  // N x G
  double log_pl = 0.0;
  double bic = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;          // mixture log-PL after every E-step
  std::vector<int> degenerate_roles;
  std::vector<std::string> warnings;
  std::vector<Eigen::Index> ego_rows;
};

/// Pseudo-BIC with N = number of egos and G*K + (G-1) free parameters.
double mixture_bic(double log_pl, int G, Eigen::Index K, std::size_t N);

struct MixtureState {
  double log_pl = 0.0;
  Eigen::MatrixXd responsibilities;
};

/// E-step: responsibilities and observed-data mixture log-PL for given
/// parameters.
MixtureState evaluate_mixture(const EgoPopulation& pop, std::span<const Eigen::VectorXd> thetas,
                              std::span<const double> pis);

/// Hard initial responsibilities: per-ego MPLE vectors (non-converged or
/// dropped entries replaced by the pooled estimate), standardized per term,
/// clustered by k-means++ with `kmeans_restarts` restarts.
Eigen::MatrixXd initialize(const EgoPopulation& pop, int G, std::uint64_t seed,
                           int kmeans_restarts = 10, const FitOptions& fit = {});

/// EM for a G-role mixture of ego pseudolikelihoods from one seeded
/// initialization.
MixtureFit fit_ego_tergm(const EgoPopulation& pop, int G, std::uint64_t seed,
                         const MixtureOptions& options = {});

/// EM from caller-supplied initial responsibilities.
MixtureFit fit_ego_tergm_from(const EgoPopulation& pop, const Eigen::MatrixXd& initial,
                              const MixtureOptions& options = {});

struct RoleSelection {
  MixtureFit best;
  std::vector<MixtureFit> fits;  // one per G, ascending
};

/// Fits G = g_min..min(g_max, cap, N), each with `options.restarts` seeded
/// EM restarts keeping the best log-PL, and returns the lowest-BIC fit.
RoleSelection select_roles(const EgoPopulation& pop, int g_min, int g_max, int cap,
                           std::uint64_t seed, const MixtureOptions& options = {});

struct RoleAssignment {
  std::vector<std::string> ego_ids;
  std::vector<std::string> role_labels;
  Eigen::MatrixXd matrix;
  std::vector<int> hard_labels;  // argmax, ties to the lowest role index
};

RoleAssignment assignment_matrix(const MixtureFit& fit);

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centers;  // G x d
  double within_ss = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding; best of `restarts` runs.
/// Rows of `points` are observations.
KMeansResult kmeans(const Eigen::MatrixXd& points, int G, std::uint64_t seed, int restarts);

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace egotergm
