#ifndef LSBVAR_TYPES_HPP
#define LSBVAR_TYPES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

#include "lsbvar/errors.hpp"
#include "lsbvar/linalg.hpp"

namespace lsbvar {

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// One subject's trajectory on a dense visit grid t = 1..T. Response entries
// may be missing (observed(t,j) == false); their stored value is a
// placeholder that must never be read before imputation. Covariates are
// always fully observed.
struct Subject {
  std::string id;
  Eigen::MatrixXd responses;      // T x k
  BoolArray observed;             // T x k
  Eigen::MatrixXd tv_covariates;  // T x p
  Eigen::VectorXd baseline;       // q

  int horizon() const { return static_cast<int>(responses.rows()); }
  bool has_missing() const { return !observed.all(); }
  int n_observed() const { return static_cast<int>(observed.count()); }
  int n_missing() const {
    return static_cast<int>(observed.size()) - n_observed();
  }
};

struct LongitudinalDataset {
  int resp_dim = 0;      // k
  int tv_cov_dim = 0;    // p
  int base_cov_dim = 0;  // q
  std::vector<Subject> subjects;

  int n_subjects() const { return static_cast<int>(subjects.size()); }
  int total_observations() const {
    int n = 0;
    for (const auto& s : subjects) n += s.horizon();
    return n;
  }
  int total_observed_entries() const {
    int n = 0;
    for (const auto& s : subjects) n += s.n_observed();
    return n;
  }
  int total_missing_entries() const {
    int n = 0;
    for (const auto& s : subjects) n += s.n_missing();
    return n;
  }
  bool has_missing() const {
    return std::any_of(subjects.begin(), subjects.end(),
                       [](const Subject& s) { return s.has_missing(); });
  }
};

// Fixed prior constants. sigma0 follows the Wishart parameterization of the
// precision prior, Sigma^-1 ~ W(sigma0, nu) with E[Sigma^-1] = nu * sigma0;
// the sampler works with the equivalent Sigma ~ IW(nu, sigma0^-1), so
// sigma_iw_scale() is what enters the variance update and moment matching.
struct ModelHyperparams {
  int truncation = 25;          // H, number of mixture components
  Eigen::VectorXd mu_alpha;     // q
  Eigen::MatrixXd sigma_alpha;  // q x q
  Eigen::MatrixXd sigma_b;      // kp x kp
  Eigen::MatrixXd sigma_gamma;  // kq x kq
  Eigen::MatrixXd sigma0;       // k x k
  double nu = 0.0;
  Eigen::VectorXd phi000;  // k^2
  double lambda = 1.0;
  Eigen::MatrixXd v00;  // k^2 x k^2
  double tau0 = 0.0;

  Eigen::MatrixXd sigma_iw_scale() const {
    return spd_inverse(sigma0, "sigma0");
  }

  void validate(int k, int p, int q) const {
    auto check_spd = [](const Eigen::MatrixXd& m, int dim,
                        const std::string& name) {
      if (m.rows() != dim || m.cols() != dim)
        throw ConfigError(name + ": expected " + std::to_string(dim) + "x" +
                          std::to_string(dim) + " matrix");
      if (!is_spd(m))
        throw ConfigError(name + ": not symmetric positive definite");
    };
    if (truncation < 1) throw ConfigError("truncation H must be >= 1");
    if (mu_alpha.size() != q)
      throw ConfigError("mu_alpha: expected length " + std::to_string(q));
    check_spd(sigma_alpha, q, "sigma_alpha");
    check_spd(sigma_b, k * p, "sigma_b");
    check_spd(sigma_gamma, k * q, "sigma_gamma");
    check_spd(sigma0, k, "sigma0");
    check_spd(v00, k * k, "v00");
    if (!(nu > k - 1)) throw ConfigError("nu must exceed resp_dim - 1");
    if (!(tau0 > k * k + 1))
      throw ConfigError("tau0 must exceed resp_dim^2 + 1");
    if (!(lambda > 0)) throw ConfigError("lambda must be > 0");
    if (phi000.size() != k * k)
      throw ConfigError("phi000: expected length " + std::to_string(k * k));
  }
};

// One configuration of every latent quantity the Gibbs sweep updates.
// Allocations are stored 0-based; file formats use 1-based component ids.
struct ChainState {
  Eigen::VectorXd b;      // kp, row-major vec of B
  Eigen::VectorXd gamma;  // kq, row-major vec of Gamma
  Eigen::MatrixXd sigma;  // k x k
  std::vector<Eigen::MatrixXd> atoms;   // H matrices, k x k
  std::vector<int> allocations;         // N, in 0..H-1
  std::vector<Eigen::VectorXd> alphas;  // H-1 vectors of length q (LSB)
  Eigen::VectorXd dp_sticks;            // H stick fractions, last == 1 (DP)
  Eigen::VectorXd phi00;                // k^2
  Eigen::MatrixXd v0;                   // k^2 x k^2
  // Responses with current imputations filled in; equals the data matrix
  // wherever entries are observed.
  std::vector<Eigen::MatrixXd> filled;
  // Current Polya-Gamma latents, one block per stick, aligned with the
  // risk set {i : G_i >= h} in subject order. Refreshed inside the alpha
  // update; not persisted.
  std::vector<std::vector<double>> pg_latents;
};

// Cluster-allocation vector with label-invariant equality. Canonical form
// relabels clusters by order of first appearance.
struct Partition {
  std::vector<int> labels;

  Partition() = default;
  explicit Partition(std::vector<int> l) : labels(std::move(l)) {}

  int size() const { return static_cast<int>(labels.size()); }

  Partition canonical() const {
    std::unordered_map<int, int> remap;
    Partition out;
    out.labels.reserve(labels.size());
    int next = 0;
    for (int l : labels) {
      auto it = remap.find(l);
      if (it == remap.end()) it = remap.emplace(l, next++).first;
      out.labels.push_back(it->second);
    }
    return out;
  }

  int n_clusters() const {
    std::vector<int> seen;
    for (int l : labels)
      if (std::find(seen.begin(), seen.end(), l) == seen.end())
        seen.push_back(l);
    return static_cast<int>(seen.size());
  }

  bool operator==(const Partition& o) const {
    return canonical().labels == o.canonical().labels;
  }
};

}  // namespace lsbvar

#endif
