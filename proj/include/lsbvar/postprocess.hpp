#ifndef LSBVAR_POSTPROCESS_HPP
#define LSBVAR_POSTPROCESS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "lsbvar/gibbs.hpp"
#include "lsbvar/stick.hpp"
#include "lsbvar/types.hpp"

namespace lsbvar {

inline std::vector<std::vector<int>> allocation_samples(
    const SampleStore& store) {
  std::vector<std::vector<int>> out;
  out.reserve(store.samples.size());
  for (const auto& s : store.samples) out.push_back(s.allocations);
  return out;
}

// Posterior pairwise co-allocation frequencies; symmetric with unit diagonal.
inline Eigen::MatrixXd co_clustering_matrix(
    const std::vector<std::vector<int>>& allocs) {
  if (allocs.empty()) throw DataError("co_clustering_matrix: no samples");
  const int n = static_cast<int>(allocs[0].size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (const auto& a : allocs)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        if (a[i] == a[j]) {
          c(i, j) += 1.0;
          c(j, i) = c(i, j);
        }
  c.diagonal().setConstant(static_cast<double>(allocs.size()));
  return c / static_cast<double>(allocs.size());
}

// Expected Binder loss with equal misclassification costs, as a function of
// the co-clustering frequencies.
inline double binder_expected_loss(const Partition& p,
                                   const Eigen::MatrixXd& coclust) {
  const int n = p.size();
  double loss = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool together = p.labels[i] == p.labels[j];
      loss += together ? 1.0 - coclust(i, j) : coclust(i, j);
    }
  return loss;
}

// Partition point estimate: the visited partition minimizing the expected
// Binder loss. Ties break toward the earliest sample.
inline Partition binder_point_estimate(
    const std::vector<std::vector<int>>& allocs) {
  if (allocs.empty()) throw DataError("binder_point_estimate: no samples");
  const Eigen::MatrixXd coclust = co_clustering_matrix(allocs);

  std::map<std::vector<int>, int> first_seen;  // canonical labels -> index
  for (std::size_t s = 0; s < allocs.size(); ++s) {
    const Partition cand(allocs[s]);
    first_seen.try_emplace(cand.canonical().labels, static_cast<int>(s));
  }
  double best_loss = std::numeric_limits<double>::infinity();
  int best_index = 0;
  Partition best;
  for (const auto& [labels, index] : first_seen) {
    const Partition cand(labels);
    const double loss = binder_expected_loss(cand, coclust);
    if (loss < best_loss - 1e-12 ||
        (std::fabs(loss - best_loss) <= 1e-12 && index < best_index)) {
      best_loss = loss;
      best_index = index;
      best = cand;
    }
  }
  return best;
}

// Hubert-Arabie adjusted Rand index from the pair-counting contingency
// table; equals 1 exactly when the partitions agree up to relabeling.
inline double adjusted_rand_index(const Partition& a, const Partition& b) {
  if (a.size() != b.size())
    throw DataError("adjusted_rand_index: partitions have different lengths");
  const int n = a.size();
  std::map<std::pair<int, int>, long long> cells;
  std::map<int, long long> row_sums, col_sums;
  for (int i = 0; i < n; ++i) {
    cells[{a.labels[i], b.labels[i]}]++;
    row_sums[a.labels[i]]++;
    col_sums[b.labels[i]]++;
  }
  auto choose2 = [](long long m) { return 0.5 * m * (m - 1); };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, c] : cells) sum_cells += choose2(c);
  for (const auto& [key, c] : row_sums) sum_rows += choose2(c);
  for (const auto& [key, c] : col_sums) sum_cols += choose2(c);
  const double total = choose2(n);
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;  // both partitions trivial
  return (sum_cells - expected) / (max_index - expected);
}

// Histogram of the number of occupied components across samples.
inline std::map<int, int> cluster_count_posterior(
    const std::vector<std::vector<int>>& allocs) {
  if (allocs.empty()) throw DataError("cluster_count_posterior: no samples");
  std::map<int, int> hist;
  for (const auto& a : allocs) hist[Partition(a).n_clusters()]++;
  return hist;
}

struct WaicReport {
  double lppd = 0.0;
  double p_waic = 0.0;
  double waic = 0.0;            // lppd - p_waic, higher is better
  double minus_two_waic = 0.0;  // deviance-scale convenience
};

// Widely applicable information criterion from per-sample per-point log
// densities (rows = samples, points indexed within rows). With a single
// sample the penalty is zero by convention.
inline WaicReport waic(const std::vector<Eigen::VectorXd>& loglik) {
  if (loglik.empty()) throw DataError("waic: no samples");
  const int s_count = static_cast<int>(loglik.size());
  const int n_points = static_cast<int>(loglik[0].size());
  for (const auto& row : loglik) {
    if (row.size() != n_points) throw DataError("waic: ragged loglik records");
    if (!row.allFinite())
      throw NumericalError("waic: non-finite log-likelihood entry");
  }
  WaicReport rep;
  for (int p = 0; p < n_points; ++p) {
    double max_ll = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < s_count; ++s) max_ll = std::max(max_ll, loglik[s][p]);
    double sum_exp = 0.0, mean = 0.0;
    for (int s = 0; s < s_count; ++s) {
      sum_exp += std::exp(loglik[s][p] - max_ll);
      mean += loglik[s][p];
    }
    mean /= s_count;
    rep.lppd += max_ll + std::log(sum_exp / s_count);
    if (s_count > 1) {
      double var = 0.0;
      for (int s = 0; s < s_count; ++s) {
        const double d = loglik[s][p] - mean;
        var += d * d;
      }
      rep.p_waic += var / (s_count - 1);
    }
  }
  rep.waic = rep.lppd - rep.p_waic;
  rep.minus_two_waic = -2.0 * rep.waic;
  return rep;
}

inline WaicReport waic(const SampleStore& store) {
  std::vector<Eigen::VectorXd> ll;
  ll.reserve(store.samples.size());
  for (const auto& s : store.samples) ll.push_back(s.loglik);
  return waic(ll);
}

// --- predictive distributions ---

inline Eigen::VectorXd sample_weights_at(const PosteriorSample& s,
                                         PriorKind prior,
                                         const Eigen::VectorXd& z_new) {
  if (prior == PriorKind::LSB)
    return compute_weights(s.alphas, z_new).values();
  return weights_from_sticks(s.dp_sticks).values();
}

// Out-of-sample trajectory prediction given baseline covariates and the
// first response: one forward roll per posterior sample, with the component
// drawn from that sample's weights at z_new so the bands carry allocation
// uncertainty. Returns horizon x k paths whose first row is y_1.
inline std::vector<Eigen::MatrixXd> predict_oos(
    const SampleStore& store, const Eigen::VectorXd& z_new,
    const Eigen::VectorXd& y1, const Eigen::MatrixXd& x_new, RngStream& rng,
    bool include_noise = true) {
  if (store.samples.empty()) throw DataError("predict_oos: empty store");
  const int horizon = static_cast<int>(x_new.rows());
  if (horizon < 1) throw ConfigError("predict_oos: horizon must be >= 1");
  const int k = store.resp_dim;

  std::vector<Eigen::MatrixXd> draws;
  draws.reserve(store.samples.size());
  for (const auto& s : store.samples) {
    const Eigen::VectorXd w = sample_weights_at(s, store.config.prior, z_new);
    const int comp = rng.categorical(w);
    const Eigen::MatrixXd& phi = s.atoms[comp];
    const Eigen::MatrixXd b_mat = unvec_rowmajor(s.b, k, store.tv_cov_dim);
    const Eigen::MatrixXd g_mat = unvec_rowmajor(s.gamma, k, store.base_cov_dim);
    const Eigen::VectorXd gz = g_mat * z_new;
    Eigen::MatrixXd path(horizon, k);
    path.row(0) = y1;
    if (horizon > 1) {
      const auto llt = cholesky(s.sigma, "predictive sigma");
      const Eigen::MatrixXd l = llt.matrixL();
      Eigen::VectorXd prev = y1;
      for (int t = 1; t < horizon; ++t) {
        Eigen::VectorXd mean =
            phi * prev + b_mat * x_new.row(t).transpose() + gz;
        if (include_noise) mean += l * draw_std_normal(k, rng);
        path.row(t) = mean;
        prev = mean;
      }
    }
    draws.push_back(std::move(path));
  }
  return draws;
}

// In-sample l-step-ahead prediction conditioned on the sampled cluster
// membership of a training subject: rolls forward from y_start under each
// sample's own allocation. Rows cover the l future steps.
inline std::vector<Eigen::MatrixXd> predict_ins(
    const SampleStore& store, int subject_index, const Eigen::VectorXd& y_start,
    const Eigen::MatrixXd& x_future, const Eigen::VectorXd& z, RngStream& rng,
    bool include_noise = true) {
  if (store.samples.empty()) throw DataError("predict_ins: empty store");
  if (subject_index < 0 || subject_index >= store.n_subjects)
    throw DataError("predict_ins: subject index out of range");
  const int l_steps = static_cast<int>(x_future.rows());
  const int k = store.resp_dim;

  std::vector<Eigen::MatrixXd> draws;
  draws.reserve(store.samples.size());
  for (const auto& s : store.samples) {
    const Eigen::MatrixXd& phi = s.atoms[s.allocations[subject_index]];
    const Eigen::MatrixXd b_mat = unvec_rowmajor(s.b, k, store.tv_cov_dim);
    const Eigen::MatrixXd g_mat = unvec_rowmajor(s.gamma, k, store.base_cov_dim);
    const Eigen::VectorXd gz = g_mat * z;
    Eigen::MatrixXd path(l_steps, k);
    if (l_steps > 0) {
      const auto llt = cholesky(s.sigma, "predictive sigma");
      const Eigen::MatrixXd l = llt.matrixL();
      Eigen::VectorXd prev = y_start;
      for (int t = 0; t < l_steps; ++t) {
        Eigen::VectorXd mean =
            phi * prev + b_mat * x_future.row(t).transpose() + gz;
        if (include_noise) mean += l * draw_std_normal(k, rng);
        path.row(t) = mean;
        prev = mean;
      }
    }
    draws.push_back(std::move(path));
  }
  return draws;
}

// Predictive draws of the autoregression matrix for a new subject with
// baseline covariates z_new: per sample, a component drawn from the weights
// at z_new, emitting that sample's atom.
inline std::vector<Eigen::MatrixXd> predictive_phi(const SampleStore& store,
                                                   const Eigen::VectorXd& z_new,
                                                   RngStream& rng) {
  if (store.samples.empty()) throw DataError("predictive_phi: empty store");
  if (store.config.prior != PriorKind::LSB)
    throw ConfigError("predictive_phi requires a covariate-dependent run");
  std::vector<Eigen::MatrixXd> draws;
  draws.reserve(store.samples.size());
  for (const auto& s : store.samples) {
    const Eigen::VectorXd w = sample_weights_at(s, store.config.prior, z_new);
    draws.push_back(s.atoms[rng.categorical(w)]);
  }
  return draws;
}

// Pointwise quantiles across predictive draws; rows follow the draw rows.
struct PredictiveQuantiles {
  Eigen::MatrixXd q05, q50, q95;  // each rows x k
};

inline PredictiveQuantiles predictive_quantiles(
    const std::vector<Eigen::MatrixXd>& draws) {
  if (draws.empty()) throw DataError("predictive_quantiles: no draws");
  const int rows = static_cast<int>(draws[0].rows());
  const int cols = static_cast<int>(draws[0].cols());
  PredictiveQuantiles q;
  q.q05.resize(rows, cols);
  q.q50.resize(rows, cols);
  q.q95.resize(rows, cols);
  std::vector<double> buf(draws.size());
  auto quantile = [&](double p) {
    const double pos = p * (buf.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, buf.size() - 1);
    return buf[lo] + (pos - lo) * (buf[hi] - buf[lo]);
  };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      for (std::size_t d = 0; d < draws.size(); ++d) buf[d] = draws[d](r, c);
      std::sort(buf.begin(), buf.end());
      q.q05(r, c) = quantile(0.05);
      q.q50(r, c) = quantile(0.50);
      q.q95(r, c) = quantile(0.95);
    }
  return q;
}

inline Eigen::MatrixXd mean_path(const std::vector<Eigen::MatrixXd>& draws) {
  if (draws.empty()) throw DataError("mean_path: no draws");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(draws[0].rows(), draws[0].cols());
  for (const auto& d : draws) m += d;
  return m / static_cast<double>(draws.size());
}

// Mean squared error of the predictive mean over the entries of `truth`,
// rows aligned with the draw rows (the first row of OOS paths replicates the
// conditioning value and is excluded by passing truth from row 1).
inline double mse_against(const Eigen::MatrixXd& predictive_mean,
                          const Eigen::MatrixXd& truth) {
  if (predictive_mean.rows() != truth.rows() ||
      predictive_mean.cols() != truth.cols())
    throw DataError("mse_against: shape mismatch");
  return (predictive_mean - truth).array().square().mean();
}

struct MseSummary {
  double mean = 0.0;
  double sd = 0.0;  // across subjects
  std::vector<double> per_subject;
};

inline MseSummary summarize_mse(std::vector<double> per_subject) {
  MseSummary s;
  s.per_subject = std::move(per_subject);
  const int n = static_cast<int>(s.per_subject.size());
  if (n == 0) return s;
  for (double v : s.per_subject) s.mean += v;
  s.mean /= n;
  if (n > 1) {
    double var = 0.0;
    for (double v : s.per_subject) var += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(var / (n - 1));
  }
  return s;
}

// Full-trajectory OOS score on a test set: per subject, predictive-mean
// paths (component redrawn per posterior sample) against the realized
// trajectory from time 2 on.
inline MseSummary oos_mse(const SampleStore& store,
                          const LongitudinalDataset& test, RngStream& rng) {
  std::vector<double> per_subject;
  per_subject.reserve(test.n_subjects());
  for (const auto& s : test.subjects) {
    const auto draws = predict_oos(store, s.baseline, s.responses.row(0),
                                   s.tv_covariates, rng,
                                   /*include_noise=*/false);
    const Eigen::MatrixXd mean = mean_path(draws);
    per_subject.push_back(mse_against(mean.bottomRows(mean.rows() - 1),
                                      s.responses.bottomRows(s.horizon() - 1)));
  }
  return summarize_mse(std::move(per_subject));
}

// l-step-ahead score for truncated training subjects: predictive-mean paths
// conditioned on each sample's cluster membership against the held-out tails.
inline MseSummary ins_mse(const SampleStore& store,
                          const LongitudinalDataset& truncated_train,
                          const std::map<int, Eigen::MatrixXd>& tails_y,
                          const std::map<int, Eigen::MatrixXd>& tails_x,
                          RngStream& rng) {
  std::vector<double> per_subject;
  per_subject.reserve(tails_y.size());
  for (const auto& [idx, truth] : tails_y) {
    const Subject& s = truncated_train.subjects[idx];
    const auto draws =
        predict_ins(store, idx, s.responses.row(s.horizon() - 1),
                    tails_x.at(idx), s.baseline, rng, /*include_noise=*/false);
    per_subject.push_back(mse_against(mean_path(draws), truth));
  }
  return summarize_mse(std::move(per_subject));
}

}  // namespace lsbvar

#endif
