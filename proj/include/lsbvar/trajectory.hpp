#ifndef LSBVAR_TRAJECTORY_HPP
#define LSBVAR_TRAJECTORY_HPP

#include <Eigen/Dense>
#include <vector>

#include "lsbvar/distributions.hpp"
#include "lsbvar/linalg.hpp"
#include "lsbvar/types.hpp"

namespace lsbvar {

// Joint Gaussian law of one stacked trajectory (y_1, ..., y_T) given the
// model parameters, in precision form. Entries are ordered time-major:
// coordinate (t, j) sits at index t*k + j.
struct TrajectoryLaw {
  Eigen::VectorXd mean;       // T*k
  Eigen::MatrixXd precision;  // T*k x T*k, block tridiagonal
  int horizon = 0;
  int resp_dim = 0;
};

// Precision blocks follow from the factorization L(y_1) prod_t L(y_t|y_{t-1})
// of the autoregression with zero baseline:
//   diagonal  S^-1 + Phi' S^-1 Phi   (t < T),   S^-1 (t = T),
//   off-diag  -Phi' S^-1 above, -S^-1 Phi below.
inline TrajectoryLaw build_trajectory_law(const Eigen::MatrixXd& phi,
                                          const Eigen::MatrixXd& b_mat,
                                          const Eigen::MatrixXd& gamma_mat,
                                          const Eigen::MatrixXd& sigma,
                                          const Eigen::MatrixXd& tv_covariates,
                                          const Eigen::VectorXd& z) {
  const int k = static_cast<int>(sigma.rows());
  const int horizon = static_cast<int>(tv_covariates.rows());
  const Eigen::MatrixXd sigma_inv = spd_inverse(sigma, "trajectory sigma");
  const Eigen::MatrixXd cross = phi.transpose() * sigma_inv;        // Phi'S^-1
  const Eigen::MatrixXd quad = cross * phi;                         // Phi'S^-1 Phi

  TrajectoryLaw law;
  law.horizon = horizon;
  law.resp_dim = k;
  law.mean.resize(horizon * k);
  const Eigen::VectorXd base = gamma_mat * z;
  for (int t = 0; t < horizon; ++t)
    law.mean.segment(t * k, k) =
        b_mat * tv_covariates.row(t).transpose() + base;

  law.precision = Eigen::MatrixXd::Zero(horizon * k, horizon * k);
  for (int t = 0; t < horizon; ++t) {
    law.precision.block(t * k, t * k, k, k) =
        (t + 1 < horizon) ? Eigen::MatrixXd(sigma_inv + quad) : sigma_inv;
    if (t + 1 < horizon) {
      law.precision.block(t * k, (t + 1) * k, k, k) = -cross;
      law.precision.block((t + 1) * k, t * k, k, k) = -cross.transpose();
    }
  }
  return law;
}

inline std::vector<int> flat_indices(const BoolArray& mask, bool want) {
  std::vector<int> idx;
  const int k = static_cast<int>(mask.cols());
  for (int t = 0; t < mask.rows(); ++t)
    for (int j = 0; j < k; ++j)
      if (mask(t, j) == want) idx.push_back(t * k + j);
  return idx;
}

struct ConditionalLaw {
  std::vector<int> missing_index;  // flat time-major positions
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Gaussian conditional of the missing coordinates given the observed ones,
// computed from the precision: the missing-missing sub-block is the
// conditional precision, so
//   mean = mu_m - J_mm^-1 J_mo (y_o - mu_o),  cov = J_mm^-1.
inline ConditionalLaw missing_conditional(const TrajectoryLaw& law,
                                          const BoolArray& observed,
                                          const Eigen::MatrixXd& responses) {
  const int k = law.resp_dim;
  ConditionalLaw cond;
  cond.missing_index = flat_indices(observed, false);
  const std::vector<int> obs_index = flat_indices(observed, true);
  const int nm = static_cast<int>(cond.missing_index.size());
  const int no = static_cast<int>(obs_index.size());
  if (nm == 0) return cond;

  Eigen::MatrixXd j_mm(nm, nm);
  for (int a = 0; a < nm; ++a)
    for (int b = 0; b < nm; ++b)
      j_mm(a, b) = law.precision(cond.missing_index[a], cond.missing_index[b]);

  Eigen::VectorXd shift = Eigen::VectorXd::Zero(nm);
  if (no > 0) {
    Eigen::MatrixXd j_mo(nm, no);
    Eigen::VectorXd resid_o(no);
    for (int b = 0; b < no; ++b) {
      const int flat = obs_index[b];
      resid_o[b] = responses(flat / k, flat % k) - law.mean[flat];
      for (int a = 0; a < nm; ++a)
        j_mo(a, b) = law.precision(cond.missing_index[a], flat);
    }
    shift = j_mo * resid_o;
  }

  auto llt = cholesky(j_mm, "conditional precision of missing entries");
  Eigen::VectorXd mu_m(nm);
  for (int a = 0; a < nm; ++a) mu_m[a] = law.mean[cond.missing_index[a]];
  cond.mean = mu_m - llt.solve(shift);
  cond.cov = symmetrize(llt.solve(Eigen::MatrixXd::Identity(nm, nm)));
  return cond;
}

// Exact conditional simulation of the missing entries of one subject; fills
// them into `responses` in place. A subject with no observed entries gets an
// unconditional draw from the trajectory law.
inline void impute_missing_entries(const TrajectoryLaw& law,
                                   const BoolArray& observed,
                                   Eigen::MatrixXd& responses,
                                   RngStream& rng) {
  const int k = law.resp_dim;
  const std::vector<int> missing_index = flat_indices(observed, false);
  const int nm = static_cast<int>(missing_index.size());
  if (nm == 0) return;

  Eigen::MatrixXd j_mm(nm, nm);
  for (int a = 0; a < nm; ++a)
    for (int b = 0; b < nm; ++b)
      j_mm(a, b) = law.precision(missing_index[a], missing_index[b]);

  const std::vector<int> obs_index = flat_indices(observed, true);
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(nm);
  if (!obs_index.empty()) {
    const int no = static_cast<int>(obs_index.size());
    Eigen::MatrixXd j_mo(nm, no);
    Eigen::VectorXd resid_o(no);
    for (int b = 0; b < no; ++b) {
      const int flat = obs_index[b];
      resid_o[b] = responses(flat / k, flat % k) - law.mean[flat];
      for (int a = 0; a < nm; ++a)
        j_mo(a, b) = law.precision(missing_index[a], flat);
    }
    shift = j_mo * resid_o;
  }

  auto llt = cholesky(j_mm, "conditional precision of missing entries");
  Eigen::VectorXd mu_m(nm);
  for (int a = 0; a < nm; ++a) mu_m[a] = law.mean[missing_index[a]];
  const Eigen::VectorXd mean = mu_m - llt.solve(shift);
  const Eigen::VectorXd draw =
      mean + llt.matrixU().solve(draw_std_normal(nm, rng));
  for (int a = 0; a < nm; ++a)
    responses(missing_index[a] / k, missing_index[a] % k) = draw[a];
}

// Log-density of each observed entry under the marginal law of the observed
// coordinates (missing coordinates integrated out), decomposed sequentially
// so the entries of one subject sum to its joint observed log-density.
// Order matches flat_indices(observed, true).
inline Eigen::VectorXd observed_entry_logliks(const TrajectoryLaw& law,
                                              const BoolArray& observed,
                                              const Eigen::MatrixXd& responses) {
  const int k = law.resp_dim;
  const std::vector<int> obs_index = flat_indices(observed, true);
  const int no = static_cast<int>(obs_index.size());
  Eigen::VectorXd out(no);
  if (no == 0) return out;

  const Eigen::MatrixXd cov = spd_inverse(law.precision, "trajectory precision");
  Eigen::MatrixXd cov_oo(no, no);
  Eigen::VectorXd resid(no);
  for (int a = 0; a < no; ++a) {
    const int fa = obs_index[a];
    resid[a] = responses(fa / k, fa % k) - law.mean[fa];
    for (int b = 0; b < no; ++b) cov_oo(a, b) = cov(fa, obs_index[b]);
  }
  auto llt = cholesky(cov_oo, "observed-marginal covariance");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::VectorXd v = llt.matrixL().solve(resid);
  for (int a = 0; a < no; ++a)
    out[a] = -0.5 * std::log(2.0 * M_PI) - std::log(l(a, a)) - 0.5 * v[a] * v[a];
  return out;
}

}  // namespace lsbvar

#endif
