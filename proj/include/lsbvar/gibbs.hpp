#ifndef LSBVAR_GIBBS_HPP
#define LSBVAR_GIBBS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "lsbvar/distributions.hpp"
#include "lsbvar/stick.hpp"
#include "lsbvar/trajectory.hpp"
#include "lsbvar/types.hpp"

namespace lsbvar {

enum class PriorKind { LSB, DP };

inline std::string prior_kind_name(PriorKind p) {
  return p == PriorKind::LSB ? "lsb" : "dp";
}

struct SamplerConfig {
  int n_iter = 0;
  int burn_in = 0;
  int thin = 1;
  std::uint64_t seed = 0;
  PriorKind prior = PriorKind::LSB;
  double dp_mass = 1.0;  // total mass of the truncated DP comparator

  int n_samples() const { return (n_iter - burn_in) / thin; }

  void validate() const {
    if (n_iter < 1) throw ConfigError("n_iter must be >= 1");
    if (burn_in < 0 || burn_in >= n_iter)
      throw ConfigError("burn_in must satisfy 0 <= burn_in < n_iter");
    if (thin < 1) throw ConfigError("thin must be >= 1");
    if (n_samples() < 1)
      throw ConfigError("(n_iter - burn_in) / thin must be >= 1");
    if (prior == PriorKind::DP && !(dp_mass > 0))
      throw ConfigError("dp_mass must be > 0");
  }
};

// One thinned post-burn-in snapshot. loglik holds the log-density of every
// observed response entry under the sample's parameters (missing entries
// marginalized out), concatenated subject-major in time-major entry order;
// imputed holds the current fill-ins of the missing entries in the same
// ordering.
struct PosteriorSample {
  Eigen::VectorXd b;
  Eigen::VectorXd gamma;
  Eigen::MatrixXd sigma;
  std::vector<Eigen::MatrixXd> atoms;
  std::vector<Eigen::VectorXd> alphas;  // LSB runs
  Eigen::VectorXd dp_sticks;            // DP runs
  std::vector<int> allocations;         // 0-based component indices
  Eigen::VectorXd phi00;
  Eigen::MatrixXd v0;
  Eigen::VectorXd loglik;
  Eigen::VectorXd imputed;
};

struct SampleStore {
  int n_subjects = 0;
  int resp_dim = 0;
  int tv_cov_dim = 0;
  int base_cov_dim = 0;
  int truncation = 0;
  std::vector<int> horizons;
  std::vector<int> observed_counts;  // observed entries per subject
  std::vector<int> missing_counts;
  SamplerConfig config;
  std::vector<PosteriorSample> samples;

  int size() const { return static_cast<int>(samples.size()); }
};

struct GaussianConditional {
  Eigen::VectorXd linear;     // natural mean parameter
  Eigen::MatrixXd precision;  // posterior precision
  Eigen::VectorXd mean() const {
    return cholesky(precision, "conditional precision").solve(linear);
  }
  Eigen::MatrixXd covariance() const {
    return spd_inverse(precision, "conditional precision");
  }
};

struct InverseWishartConditional {
  double dof = 0.0;
  Eigen::MatrixXd scale;
};

struct BetaConditional {
  double a = 0.0;
  double b = 0.0;
};

// Blocked Gibbs sweep over all latent quantities of the mixture-of-VAR
// model. One sweep imputes missing responses, then updates in order:
// shared coefficients b and gamma, the noise covariance, the component
// indicators, the component matrices, the weight parameters (logit sticks
// via Polya-Gamma augmentation, or plain Beta sticks for the truncated DP
// comparator), and the atom-prior center and spread.
class GibbsSampler {
 public:
  GibbsSampler(const LongitudinalDataset& ds, const ModelHyperparams& hp,
               const SamplerConfig& cfg)
      : ds_(ds), hp_(hp), cfg_(cfg) {
    cfg_.validate();
    hp_.validate(ds.resp_dim, ds.tv_cov_dim, ds.base_cov_dim);
    k_ = ds.resp_dim;
    p_ = ds.tv_cov_dim;
    q_ = ds.base_cov_dim;
    n_ = ds.n_subjects();
    h_ = hp.truncation;
    total_obs_ = ds.total_observations();

    sxx_ = Eigen::MatrixXd::Zero(p_, p_);
    szz_ = Eigen::MatrixXd::Zero(q_, q_);
    for (const auto& s : ds_.subjects) {
      for (int t = 0; t < s.horizon(); ++t) {
        const Eigen::VectorXd x = s.tv_covariates.row(t);
        sxx_ += x * x.transpose();
      }
      szz_ += s.horizon() * s.baseline * s.baseline.transpose();
    }
    sigma_b_inv_ = p_ > 0 ? spd_inverse(hp_.sigma_b, "sigma_b")
                          : Eigen::MatrixXd(0, 0);
    sigma_gamma_inv_ = q_ > 0 ? spd_inverse(hp_.sigma_gamma, "sigma_gamma")
                              : Eigen::MatrixXd(0, 0);
    sigma_alpha_inv_ = q_ > 0 ? spd_inverse(hp_.sigma_alpha, "sigma_alpha")
                              : Eigen::MatrixXd(0, 0);
    sigma_iw_scale_ = hp_.sigma_iw_scale();
  }

  const ChainState& state() const { return state_; }
  ChainState& state() { return state_; }
  const SamplerConfig& config() const { return cfg_; }
  const ModelHyperparams& hyperparams() const { return hp_; }

  // Draws every latent quantity from its prior and attaches the data with
  // missing entries set to a placeholder (imputation runs before anything
  // reads them).
  void init_state(RngStream& rng) {
    state_ = ChainState{};
    state_.v0 = draw_inverse_wishart(hp_.tau0, hp_.v00, rng);
    state_.phi00 = draw_mvn(hp_.phi000, state_.v0 / hp_.lambda, rng);
    state_.atoms.resize(h_);
    for (int h = 0; h < h_; ++h)
      state_.atoms[h] =
          unvec_rowmajor(draw_mvn(state_.phi00, state_.v0, rng), k_, k_);
    state_.sigma = draw_inverse_wishart(hp_.nu, sigma_iw_scale_, rng);
    state_.b = p_ > 0 ? draw_mvn(Eigen::VectorXd::Zero(k_ * p_), hp_.sigma_b, rng)
                      : Eigen::VectorXd(0);
    state_.gamma = q_ > 0
                       ? draw_mvn(Eigen::VectorXd::Zero(k_ * q_), hp_.sigma_gamma, rng)
                       : Eigen::VectorXd(0);
    if (cfg_.prior == PriorKind::LSB) {
      state_.alphas.resize(h_ - 1);
      for (auto& a : state_.alphas) a = draw_mvn(hp_.mu_alpha, hp_.sigma_alpha, rng);
    } else {
      state_.dp_sticks.resize(h_);
      for (int h = 0; h + 1 < h_; ++h)
        state_.dp_sticks[h] = rng.beta(1.0, cfg_.dp_mass);
      state_.dp_sticks[h_ - 1] = 1.0;
    }
    state_.allocations.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const StickWeights w = subject_weights(i);
      state_.allocations[i] = rng.categorical(w.values());
    }
    state_.filled.clear();
    state_.filled.reserve(n_);
    for (const auto& s : ds_.subjects) {
      Eigen::MatrixXd f = s.responses;
      for (int t = 0; t < s.horizon(); ++t)
        for (int j = 0; j < k_; ++j)
          if (!s.observed(t, j)) f(t, j) = 0.0;
      state_.filled.push_back(std::move(f));
    }
    state_.pg_latents.assign(std::max(h_ - 1, 0), {});
  }

  void sweep(RngStream& rng) {
    impute_missing(rng);
    update_b(rng);
    update_gamma(rng);
    update_sigma(rng);
    update_allocations(rng);
    update_atoms(rng);
    if (cfg_.prior == PriorKind::LSB)
      update_alphas(rng);
    else
      update_dp_sticks(rng);
    update_hyper(rng);
  }

  // --- step 0: missing responses ---

  void impute_missing(RngStream& rng) {
    for (int i = 0; i < n_; ++i) {
      const Subject& s = ds_.subjects[i];
      if (!s.has_missing()) continue;
      const TrajectoryLaw law = subject_law(i);
      impute_missing_entries(law, s.observed, state_.filled[i], rng);
    }
  }

  // --- step 1: shared time-varying coefficients ---

  GaussianConditional b_conditional() const {
    const Eigen::MatrixXd sigma_inv = spd_inverse(state_.sigma, "sigma");
    Eigen::MatrixXd swx = Eigen::MatrixXd::Zero(k_, p_);
    const Eigen::MatrixXd gamma_mat = unvec_rowmajor(state_.gamma, k_, q_);
    for (int i = 0; i < n_; ++i) {
      const Subject& s = ds_.subjects[i];
      const Eigen::MatrixXd& phi = state_.atoms[state_.allocations[i]];
      const Eigen::VectorXd gz = gamma_mat * s.baseline;
      for (int t = 0; t < s.horizon(); ++t) {
        Eigen::VectorXd r = state_.filled[i].row(t).transpose() - gz;
        if (t > 0) r -= phi * state_.filled[i].row(t - 1).transpose();
        swx += r * s.tv_covariates.row(t);
      }
    }
    GaussianConditional cond;
    cond.precision = kron(sigma_inv, sxx_) + sigma_b_inv_;
    cond.linear = vec_rowmajor(sigma_inv * swx);
    return cond;
  }

  void update_b(RngStream& rng) {
    if (p_ == 0) return;
    const auto cond = b_conditional();
    state_.b = draw_mvn_precision(cond.linear, cond.precision, rng);
  }

  // --- step 2: baseline-covariate coefficients ---

  GaussianConditional gamma_conditional() const {
    const Eigen::MatrixXd sigma_inv = spd_inverse(state_.sigma, "sigma");
    Eigen::MatrixXd swz = Eigen::MatrixXd::Zero(k_, q_);
    const Eigen::MatrixXd b_mat = unvec_rowmajor(state_.b, k_, p_);
    for (int i = 0; i < n_; ++i) {
      const Subject& s = ds_.subjects[i];
      const Eigen::MatrixXd& phi = state_.atoms[state_.allocations[i]];
      for (int t = 0; t < s.horizon(); ++t) {
        Eigen::VectorXd r = state_.filled[i].row(t).transpose() -
                            b_mat * s.tv_covariates.row(t).transpose();
        if (t > 0) r -= phi * state_.filled[i].row(t - 1).transpose();
        swz += r * s.baseline.transpose();
      }
    }
    GaussianConditional cond;
    cond.precision = kron(sigma_inv, szz_) + sigma_gamma_inv_;
    cond.linear = vec_rowmajor(sigma_inv * swz);
    return cond;
  }

  void update_gamma(RngStream& rng) {
    if (q_ == 0) return;
    const auto cond = gamma_conditional();
    state_.gamma = draw_mvn_precision(cond.linear, cond.precision, rng);
  }

  // --- step 3: noise covariance ---

  InverseWishartConditional sigma_conditional() const {
    Eigen::MatrixXd ssr = Eigen::MatrixXd::Zero(k_, k_);
    const Eigen::MatrixXd b_mat = unvec_rowmajor(state_.b, k_, p_);
    const Eigen::MatrixXd gamma_mat = unvec_rowmajor(state_.gamma, k_, q_);
    for (int i = 0; i < n_; ++i) {
      const Subject& s = ds_.subjects[i];
      const Eigen::MatrixXd& phi = state_.atoms[state_.allocations[i]];
      const Eigen::VectorXd gz = gamma_mat * s.baseline;
      for (int t = 0; t < s.horizon(); ++t) {
        Eigen::VectorXd r = state_.filled[i].row(t).transpose() -
                            b_mat * s.tv_covariates.row(t).transpose() - gz;
        if (t > 0) r -= phi * state_.filled[i].row(t - 1).transpose();
        ssr += r * r.transpose();
      }
    }
    InverseWishartConditional cond;
    cond.dof = hp_.nu + total_obs_;
    cond.scale = symmetrize(ssr + sigma_iw_scale_);
    return cond;
  }

  void update_sigma(RngStream& rng) {
    const auto cond = sigma_conditional();
    state_.sigma = draw_inverse_wishart(cond.dof, cond.scale, rng);
  }

  // --- step 4: component indicators ---

  // Unnormalized log allocation probabilities of one subject across the H
  // components: log weight plus the Gaussian log-likelihood of the filled
  // trajectory under each candidate matrix.
  Eigen::VectorXd allocation_logprobs(int i) const {
    const Subject& s = ds_.subjects[i];
    const Eigen::VectorXd logw = subject_log_weights(i);
    const Eigen::MatrixXd b_mat = unvec_rowmajor(state_.b, k_, p_);
    const Eigen::MatrixXd gamma_mat = unvec_rowmajor(state_.gamma, k_, q_);
    const auto llt = cholesky(state_.sigma, "sigma");
    const double log_det = log_det_from_llt(llt);
    const int horizon = s.horizon();

    // residuals without the autoregressive part, and lagged responses
    Eigen::MatrixXd base(horizon, k_);
    Eigen::MatrixXd lagged = Eigen::MatrixXd::Zero(horizon, k_);
    const Eigen::VectorXd gz = gamma_mat * s.baseline;
    for (int t = 0; t < horizon; ++t) {
      base.row(t) = state_.filled[i].row(t).transpose() -
                    b_mat * s.tv_covariates.row(t).transpose() - gz;
      if (t > 0) lagged.row(t) = state_.filled[i].row(t - 1);
    }

    Eigen::VectorXd logp(h_);
    const double norm_const =
        -0.5 * horizon * (k_ * std::log(2.0 * M_PI) + log_det);
    for (int h = 0; h < h_; ++h) {
      const Eigen::MatrixXd resid =
          base - lagged * state_.atoms[h].transpose();
      const Eigen::MatrixXd scaled = llt.matrixL().solve(resid.transpose());
      logp[h] = logw[h] + norm_const - 0.5 * scaled.squaredNorm();
    }
    return logp;
  }

  void update_allocations(RngStream& rng) {
    for (int i = 0; i < n_; ++i) {
      Eigen::VectorXd logp = allocation_logprobs(i);
      const double m = logp.maxCoeff();
      if (!std::isfinite(m))
        throw SamplerError(
            "allocation update: all component log-probabilities are -inf "
            "for subject " + ds_.subjects[i].id);
      const Eigen::VectorXd w = (logp.array() - m).exp();
      state_.allocations[i] = rng.categorical(w);
    }
  }

  // --- step 5: component matrices ---

  GaussianConditional atom_conditional(int h) const {
    const Eigen::MatrixXd sigma_inv = spd_inverse(state_.sigma, "sigma");
    const Eigen::MatrixXd v0_inv = spd_inverse(state_.v0, "v0");
    const Eigen::MatrixXd b_mat = unvec_rowmajor(state_.b, k_, p_);
    const Eigen::MatrixXd gamma_mat = unvec_rowmajor(state_.gamma, k_, q_);
    Eigen::MatrixXd sxx = Eigen::MatrixXd::Zero(k_, k_);
    Eigen::MatrixXd swx = Eigen::MatrixXd::Zero(k_, k_);
    for (int i = 0; i < n_; ++i) {
      if (state_.allocations[i] != h) continue;
      const Subject& s = ds_.subjects[i];
      const Eigen::VectorXd gz = gamma_mat * s.baseline;
      for (int t = 1; t < s.horizon(); ++t) {
        const Eigen::VectorXd prev = state_.filled[i].row(t - 1);
        const Eigen::VectorXd r = state_.filled[i].row(t).transpose() -
                                  b_mat * s.tv_covariates.row(t).transpose() -
                                  gz;
        sxx += prev * prev.transpose();
        swx += r * prev.transpose();
      }
    }
    GaussianConditional cond;
    cond.precision = kron(sigma_inv, sxx) + v0_inv;
    cond.linear = vec_rowmajor(sigma_inv * swx) + v0_inv * state_.phi00;
    return cond;
  }

  void update_atoms(RngStream& rng) {
    std::vector<bool> occupied(h_, false);
    for (int g : state_.allocations) occupied[g] = true;
    for (int h = 0; h < h_; ++h) {
      if (occupied[h]) {
        const auto cond = atom_conditional(h);
        state_.atoms[h] =
            unvec_rowmajor(draw_mvn_precision(cond.linear, cond.precision, rng),
                           k_, k_);
      } else {
        // empty component: draw from the current atom prior
        state_.atoms[h] =
            unvec_rowmajor(draw_mvn(state_.phi00, state_.v0, rng), k_, k_);
      }
    }
  }

  // --- step 6 (LSB): stick parameters via Polya-Gamma augmentation ---

  std::vector<int> risk_set(int h) const {
    std::vector<int> r;
    for (int i = 0; i < n_; ++i)
      if (state_.allocations[i] >= h) r.push_back(i);
    return r;
  }

  GaussianConditional alpha_conditional(int h, const std::vector<int>& risk,
                                        const std::vector<double>& omega) const {
    GaussianConditional cond;
    cond.precision = sigma_alpha_inv_;
    cond.linear = sigma_alpha_inv_ * hp_.mu_alpha;
    for (std::size_t r = 0; r < risk.size(); ++r) {
      const int i = risk[r];
      const Eigen::VectorXd& z = ds_.subjects[i].baseline;
      cond.precision += omega[r] * z * z.transpose();
      cond.linear += ((state_.allocations[i] == h ? 1.0 : 0.0) - 0.5) * z;
    }
    return cond;
  }

  void update_alphas(RngStream& rng) {
    state_.pg_latents.assign(std::max(h_ - 1, 0), {});
    for (int h = 0; h + 1 < h_; ++h) {
      const std::vector<int> risk = risk_set(h);
      if (risk.empty()) {
        state_.alphas[h] = draw_mvn(hp_.mu_alpha, hp_.sigma_alpha, rng);
        continue;
      }
      std::vector<double>& omega = state_.pg_latents[h];
      omega.resize(risk.size());
      for (std::size_t r = 0; r < risk.size(); ++r) {
        const double c = ds_.subjects[risk[r]].baseline.dot(state_.alphas[h]);
        omega[r] = sample_polya_gamma(c, rng);
      }
      const auto cond = alpha_conditional(h, risk, omega);
      state_.alphas[h] = draw_mvn_precision(cond.linear, cond.precision, rng);
    }
  }

  // --- step 6 (DP): covariate-free stick fractions ---

  BetaConditional dp_stick_conditional(int h) const {
    std::vector<int> counts(h_, 0);
    for (int g : state_.allocations) counts[g]++;
    int tail = 0;
    for (int l = h + 1; l < h_; ++l) tail += counts[l];
    return {1.0 + counts[h], cfg_.dp_mass + tail};
  }

  void update_dp_sticks(RngStream& rng) {
    std::vector<int> counts(h_, 0);
    for (int g : state_.allocations) counts[g]++;
    int tail = 0;
    for (int l = 0; l < h_; ++l) tail += counts[l];
    for (int h = 0; h + 1 < h_; ++h) {
      tail -= counts[h];
      state_.dp_sticks[h] = rng.beta(1.0 + counts[h], cfg_.dp_mass + tail);
    }
    state_.dp_sticks[h_ - 1] = 1.0;
  }

  // --- step 7: atom-prior center and spread ---

  struct HyperConditional {
    Eigen::VectorXd phi00_mean;
    double phi00_cov_scale = 0.0;  // covariance is v0 * this
    double v0_dof = 0.0;
    Eigen::MatrixXd v0_scale;
  };

  HyperConditional hyper_conditional() const {
    const int d = k_ * k_;
    Eigen::VectorXd mean_atom = Eigen::VectorXd::Zero(d);
    for (const auto& a : state_.atoms) mean_atom += vec_rowmajor(a);
    mean_atom /= h_;
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (const auto& a : state_.atoms) {
      const Eigen::VectorXd dvec = vec_rowmajor(a) - mean_atom;
      scatter += dvec * dvec.transpose();
    }
    const Eigen::VectorXd centered = mean_atom - hp_.phi000;
    HyperConditional cond;
    cond.phi00_mean = (h_ * mean_atom + hp_.lambda * hp_.phi000) / (h_ + hp_.lambda);
    cond.phi00_cov_scale = 1.0 / (h_ + hp_.lambda);
    cond.v0_dof = h_ + hp_.tau0;
    cond.v0_scale = symmetrize(
        hp_.v00 + scatter +
        (h_ * hp_.lambda / (h_ + hp_.lambda)) * centered * centered.transpose());
    return cond;
  }

  void update_hyper(RngStream& rng) {
    const auto cond = hyper_conditional();
    state_.v0 = draw_inverse_wishart(cond.v0_dof, cond.v0_scale, rng);
    state_.phi00 =
        draw_mvn(cond.phi00_mean, state_.v0 * cond.phi00_cov_scale, rng);
  }

  // --- records ---

  TrajectoryLaw subject_law(int i) const {
    const Subject& s = ds_.subjects[i];
    return build_trajectory_law(state_.atoms[state_.allocations[i]],
                                unvec_rowmajor(state_.b, k_, p_),
                                unvec_rowmajor(state_.gamma, k_, q_),
                                state_.sigma, s.tv_covariates, s.baseline);
  }

  // Per-observed-entry conditional log-densities, all subjects concatenated.
  Eigen::VectorXd loglik_records() const {
    Eigen::VectorXd out(ds_.total_observed_entries());
    int pos = 0;
    for (int i = 0; i < n_; ++i) {
      const Subject& s = ds_.subjects[i];
      const Eigen::VectorXd ll =
          observed_entry_logliks(subject_law(i), s.observed, state_.filled[i]);
      out.segment(pos, ll.size()) = ll;
      pos += static_cast<int>(ll.size());
    }
    return out;
  }

  Eigen::VectorXd imputed_records() const {
    Eigen::VectorXd out(ds_.total_missing_entries());
    int pos = 0;
    for (int i = 0; i < n_; ++i) {
      const Subject& s = ds_.subjects[i];
      for (int t = 0; t < s.horizon(); ++t)
        for (int j = 0; j < k_; ++j)
          if (!s.observed(t, j)) out[pos++] = state_.filled[i](t, j);
    }
    return out;
  }

  PosteriorSample snapshot() const {
    PosteriorSample sm;
    sm.b = state_.b;
    sm.gamma = state_.gamma;
    sm.sigma = state_.sigma;
    sm.atoms = state_.atoms;
    sm.alphas = state_.alphas;
    sm.dp_sticks = state_.dp_sticks;
    sm.allocations = state_.allocations;
    sm.phi00 = state_.phi00;
    sm.v0 = state_.v0;
    sm.loglik = loglik_records();
    sm.imputed = imputed_records();
    return sm;
  }

  // Replaces the working responses with a draw from the observation model
  // given the current state (all entries, observed or not). Used by
  // prior-vs-posterior coherence checks that alternate parameter sweeps
  // with data regeneration.
  void regenerate_responses(RngStream& rng) {
    const Eigen::MatrixXd b_mat = unvec_rowmajor(state_.b, k_, p_);
    const Eigen::MatrixXd gamma_mat = unvec_rowmajor(state_.gamma, k_, q_);
    const auto llt = cholesky(state_.sigma, "sigma");
    const Eigen::MatrixXd l = llt.matrixL();
    for (int i = 0; i < n_; ++i) {
      const Subject& s = ds_.subjects[i];
      const Eigen::MatrixXd& phi = state_.atoms[state_.allocations[i]];
      const Eigen::VectorXd gz = gamma_mat * s.baseline;
      Eigen::VectorXd prev = Eigen::VectorXd::Zero(k_);
      for (int t = 0; t < s.horizon(); ++t) {
        const Eigen::VectorXd mean =
            phi * prev + b_mat * s.tv_covariates.row(t).transpose() + gz;
        prev = mean + l * draw_std_normal(k_, rng);
        state_.filled[i].row(t) = prev;
      }
    }
  }

 private:
  StickWeights subject_weights(int i) const {
    if (cfg_.prior == PriorKind::LSB)
      return compute_weights(state_.alphas, ds_.subjects[i].baseline);
    return weights_from_sticks(state_.dp_sticks);
  }

  Eigen::VectorXd subject_log_weights(int i) const {
    if (cfg_.prior == PriorKind::LSB)
      return log_stick_weights(state_.alphas, ds_.subjects[i].baseline);
    return log_weights_from_sticks(state_.dp_sticks);
  }

  const LongitudinalDataset& ds_;
  ModelHyperparams hp_;
  SamplerConfig cfg_;
  ChainState state_;
  int k_ = 0, p_ = 0, q_ = 0, n_ = 0, h_ = 0;
  int total_obs_ = 0;
  Eigen::MatrixXd sxx_, szz_;
  Eigen::MatrixXd sigma_b_inv_, sigma_gamma_inv_, sigma_alpha_inv_;
  Eigen::MatrixXd sigma_iw_scale_;
};

// Runs one chain to completion in memory. Snapshots are taken after burn-in
// at the thinning stride, so the store ends up with exactly
// (n_iter - burn_in) / thin samples.
inline SampleStore run_chain(const LongitudinalDataset& ds,
                             const ModelHyperparams& hp,
                             const SamplerConfig& cfg) {
  GibbsSampler sampler(ds, hp, cfg);
  RngStream rng(cfg.seed);
  sampler.init_state(rng);

  SampleStore store;
  store.n_subjects = ds.n_subjects();
  store.resp_dim = ds.resp_dim;
  store.tv_cov_dim = ds.tv_cov_dim;
  store.base_cov_dim = ds.base_cov_dim;
  store.truncation = hp.truncation;
  store.config = cfg;
  for (const auto& s : ds.subjects) {
    store.horizons.push_back(s.horizon());
    store.observed_counts.push_back(s.n_observed());
    store.missing_counts.push_back(s.n_missing());
  }
  store.samples.reserve(cfg.n_samples());

  for (int it = 1; it <= cfg.n_iter; ++it) {
    try {
      sampler.sweep(rng);
    } catch (const std::exception& e) {
      throw SamplerError("iteration " + std::to_string(it) + ": " + e.what());
    }
    if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0)
      store.samples.push_back(sampler.snapshot());
  }
  return store;
}

}  // namespace lsbvar

#endif
