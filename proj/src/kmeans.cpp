#include <cmath>
#include <limits>
#include <map>

#include "egotergm/errors.hpp"
#include "egotergm/mixture.hpp"
#include "egotergm/random.hpp"

namespace egotergm {

namespace {

KMeansResult lloyd(const Eigen::MatrixXd& points, int G, Rng& rng) {
  const Eigen::Index n = points.rows();
  KMeansResult res;
  res.centers.resize(G, points.cols());

  // k-means++ seeding; when every remaining point coincides with a chosen
  // center, fall back to a uniform pick among unchosen points.
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  Eigen::VectorXd d2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (int c = 0; c < G; ++c) {
    Eigen::Index pick = 0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!chosen[static_cast<std::size_t>(i)]) total += d2(i);
    if (c > 0 && total > 0 && std::isfinite(total)) {
      double u = uniform01(rng) * total;
      pick = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (chosen[static_cast<std::size_t>(i)] || !(d2(i) > 0)) continue;
        pick = i;
        u -= d2(i);
        if (u < 0) break;
      }
    } else {
      std::vector<Eigen::Index> open;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!chosen[static_cast<std::size_t>(i)]) open.push_back(i);
      pick = open[uniform_index(rng, open.size())];
    }
    chosen[static_cast<std::size_t>(pick)] = true;
    res.centers.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), (points.row(i) - points.row(pick)).squaredNorm());
  }

  res.labels.assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < G; ++c) {
        const double d = (points.row(i) - res.centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (res.labels[static_cast<std::size_t>(i)] != best) {
        res.labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(G, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(G), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = res.labels[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < G; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        res.centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
  }
  res.within_ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    res.within_ss += (points.row(i) - res.centers.row(res.labels[static_cast<std::size_t>(i)])).squaredNorm();
  return res;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int G, std::uint64_t seed, int restarts) {
  if (G < 1 || G > points.rows())
    throw EstimationError("k-means needs between 1 and N clusters");
  KMeansResult best;
  best.within_ss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    Rng rng = make_rng(seed, {0x6b6d65616e73ULL, static_cast<std::uint64_t>(r)});
    KMeansResult run = lloyd(points, G, rng);
    if (run.within_ss < best.within_ss) best = std::move(run);
  }
  return best;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: length mismatch");
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  auto pairs = [](double m) { return m * (m - 1) / 2; };
  double index = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& [_, m] : joint) index += pairs(m);
  for (const auto& [_, m] : rows) sum_rows += pairs(m);
  for (const auto& [_, m] : cols) sum_cols += pairs(m);
  const double total = pairs(static_cast<double>(a.size()));
  if (total == 0) return 1.0;
  const double expected = sum_rows * sum_cols / total;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

}  // namespace egotergm
