#ifndef LSBVAR_PRIOR_MC_HPP
#define LSBVAR_PRIOR_MC_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lsbvar/errors.hpp"
#include "lsbvar/rng.hpp"
#include "lsbvar/stick.hpp"

namespace lsbvar {

struct PriorClusterDraw {
  int n_clusters = 0;
  double max_fraction = 0.0;
};

// Prior-predictive simulation of the partition induced by the logit
// stick-breaking construction: alpha_h ~ N(0, sigma_alpha_sq I), each subject
// allocated categorically by its covariate-dependent weights. Reports the
// number of occupied components and the largest-cluster share per draw.
inline std::vector<PriorClusterDraw> prior_cluster_monte_carlo(
    const Eigen::MatrixXd& z_design, int truncation, double sigma_alpha_sq,
    int draws, std::uint64_t seed) {
  if (truncation < 1) throw ConfigError("prior_cluster_monte_carlo: H < 1");
  if (draws < 1) throw ConfigError("prior_cluster_monte_carlo: draws < 1");
  if (!(sigma_alpha_sq > 0.0))
    throw ConfigError("prior_cluster_monte_carlo: sigma_alpha_sq must be > 0");
  const int n = static_cast<int>(z_design.rows());
  const int q = static_cast<int>(z_design.cols());
  const double sd = std::sqrt(sigma_alpha_sq);

  RngStream rng(seed);
  std::vector<PriorClusterDraw> out;
  out.reserve(draws);
  std::vector<int> counts(truncation);
  for (int d = 0; d < draws; ++d) {
    std::vector<Eigen::VectorXd> alphas(truncation - 1);
    for (auto& a : alphas) {
      a.resize(q);
      for (int j = 0; j < q; ++j) a[j] = sd * rng.normal();
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      const StickWeights w = compute_weights(alphas, z_design.row(i));
      counts[rng.categorical(w.values())]++;
    }
    PriorClusterDraw rec;
    int max_count = 0;
    for (int h = 0; h < truncation; ++h) {
      if (counts[h] > 0) ++rec.n_clusters;
      max_count = std::max(max_count, counts[h]);
    }
    rec.max_fraction = n > 0 ? static_cast<double>(max_count) / n : 0.0;
    out.push_back(rec);
  }
  return out;
}

inline double median_cluster_count(const std::vector<PriorClusterDraw>& draws) {
  std::vector<int> counts;
  counts.reserve(draws.size());
  for (const auto& d : draws) counts.push_back(d.n_clusters);
  std::sort(counts.begin(), counts.end());
  const std::size_t n = counts.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? counts[n / 2]
                    : 0.5 * (counts[n / 2 - 1] + counts[n / 2]);
}

}  // namespace lsbvar

#endif
