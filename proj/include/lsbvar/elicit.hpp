#ifndef LSBVAR_ELICIT_HPP
#define LSBVAR_ELICIT_HPP

#include <Eigen/Dense>
#include <cmath>

#include "lsbvar/linalg.hpp"
#include "lsbvar/types.hpp"

namespace lsbvar {

struct VarMle {
  Eigen::MatrixXd phi;    // k x k
  Eigen::MatrixXd sigma;  // k x k, residual covariance
  int n_transitions = 0;
};

// Conditional maximum likelihood for y_t | y_{t-1} ~ N(Phi y_{t-1}, Sigma),
// fitted on the observed consecutive pairs (t-1, t) of complete-case
// subjects only. The zero baseline convention is not used here: only real
// transitions enter, so on noiseless data the estimate is exact.
inline VarMle var1_mle_complete_cases(const LongitudinalDataset& ds) {
  const int k = ds.resp_dim;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);   // sum y_{t-1} y_{t-1}'
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(k, k);  // sum y_t y_{t-1}'
  int n_pairs = 0;
  int n_complete = 0;
  for (const auto& s : ds.subjects) {
    if (s.has_missing()) continue;
    ++n_complete;
    for (int t = 1; t < s.horizon(); ++t) {
      const Eigen::VectorXd prev = s.responses.row(t - 1);
      const Eigen::VectorXd cur = s.responses.row(t);
      gram += prev * prev.transpose();
      cross += cur * prev.transpose();
      ++n_pairs;
    }
  }
  if (n_complete == 0)
    throw DataError("elicitation: no subject with fully observed responses");
  if (n_pairs == 0)
    throw DataError("elicitation: no consecutive response pairs available");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (!lu.isInvertible())
    throw DataError("elicitation: lagged response Gram matrix is singular");
  VarMle mle;
  mle.phi = cross * lu.inverse();
  Eigen::MatrixXd ssr = Eigen::MatrixXd::Zero(k, k);
  for (const auto& s : ds.subjects) {
    if (s.has_missing()) continue;
    for (int t = 1; t < s.horizon(); ++t) {
      const Eigen::VectorXd r =
          s.responses.row(t).transpose() -
          mle.phi * s.responses.row(t - 1).transpose();
      ssr += r * r.transpose();
    }
  }
  mle.sigma = ssr / n_pairs;
  mle.n_transitions = n_pairs;
  return mle;
}

struct InverseWishartMatch {
  double dof = 0.0;
  Eigen::MatrixXd scale;
};

// Solves E[S] = mean_target and mean_i Var[S_ii] = diag_var_target for an
// inverse-Wishart law in closed form:
//   scale = (dof - d - 1) * mean_target,
//   Var[S_ii] = 2 * mean_target_ii^2 / (dof - d - 3).
// When the mean has several distinct diagonal entries the variance target is
// matched on average across the diagonal.
inline InverseWishartMatch match_inverse_wishart(
    const Eigen::MatrixXd& mean_target, double diag_var_target) {
  const int d = static_cast<int>(mean_target.rows());
  if (!(diag_var_target > 0.0))
    throw ConfigError("inverse-Wishart matching: variance target " +
                      std::to_string(diag_var_target) + " must be positive");
  const double m2 = mean_target.diagonal().array().square().mean();
  if (!(m2 > 0.0))
    throw ConfigError(
        "inverse-Wishart matching: mean target has a zero diagonal");
  InverseWishartMatch match;
  match.dof = d + 3.0 + 2.0 * m2 / diag_var_target;
  match.scale = (match.dof - d - 1.0) * mean_target;
  if (!is_spd(match.scale))
    throw ConfigError(
        "inverse-Wishart matching: mean target is not positive definite");
  return match;
}

// Implied mean_i Var[S_ii] under IW(dof, scale); monotone decreasing in dof,
// used as an independent check of the closed-form match.
inline double inverse_wishart_diag_variance(double dof,
                                            const Eigen::MatrixXd& scale) {
  const int d = static_cast<int>(scale.rows());
  if (!(dof > d + 3)) return std::numeric_limits<double>::infinity();
  const double c = (dof - d - 1.0) * (dof - d - 1.0) * (dof - d - 3.0);
  return 2.0 * scale.diagonal().array().square().mean() / c;
}

struct ElicitationTargets {
  double v0_diag_var = 1.5;     // E[V_0] = I is implied
  double sigma_diag_var = 10.0; // E[Sigma] = MLE residual covariance
};

struct ElicitationResult {
  Eigen::MatrixXd phi_hat;    // k x k
  Eigen::MatrixXd sigma_hat;  // k x k
  Eigen::MatrixXd v00;        // k^2 x k^2
  double tau0 = 0.0;
  Eigen::MatrixXd sigma0;  // Wishart scale of the precision prior
  double nu = 0.0;
  Eigen::VectorXd phi000;  // vec of phi_hat
  double lambda = 1.0;
};

// Data-driven hyperparameters: a complete-case VAR fit pins the atom prior
// center, and two inverse-Wishart moment matches pin (V_00, tau_0) and
// (Sigma_0, nu).
inline ElicitationResult elicit_hyperparams(
    const LongitudinalDataset& ds,
    const ElicitationTargets& targets = ElicitationTargets{}) {
  const int k = ds.resp_dim;
  const VarMle mle = var1_mle_complete_cases(ds);

  ElicitationResult res;
  res.phi_hat = mle.phi;
  res.sigma_hat = mle.sigma;
  res.phi000 = vec_rowmajor(mle.phi);
  res.lambda = 1.0;

  const auto v0 = match_inverse_wishart(
      Eigen::MatrixXd::Identity(k * k, k * k), targets.v0_diag_var);
  res.v00 = v0.scale;
  res.tau0 = v0.dof;

  if (!is_spd(mle.sigma))
    throw DataError(
        "elicitation: residual covariance is singular; targets for Sigma "
        "cannot be matched");
  const auto sm = match_inverse_wishart(mle.sigma, targets.sigma_diag_var);
  res.nu = sm.dof;
  // sm.scale is the inverse-Wishart scale of Sigma; convert to the Wishart
  // scale of the precision parameterization
  res.sigma0 = spd_inverse(sm.scale, "matched Sigma scale");
  return res;
}

}  // namespace lsbvar

#endif
