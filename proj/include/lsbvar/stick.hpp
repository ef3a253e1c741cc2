#ifndef LSBVAR_STICK_HPP
#define LSBVAR_STICK_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "lsbvar/errors.hpp"

namespace lsbvar {

inline double softplus(double x) {
  return std::log1p(std::exp(-std::fabs(x))) + std::max(x, 0.0);
}

// log nu and log(1 - nu) for nu = logistic(u), computed without overflow.
inline double log_logistic(double u) { return -softplus(-u); }
inline double log1m_logistic(double u) { return -softplus(u); }

// Mixture weights from the stick-breaking recursion
//   w_1 = nu_1, w_h = nu_h * prod_{l<h} (1 - nu_l), nu_H = 1.
// Only the factory functions below can build one, so the sum-to-one
// identity holds by construction.
class StickWeights {
 public:
  const Eigen::VectorXd& values() const { return w_; }
  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int h) const { return w_[h]; }

  // Recursion applied to log stick fractions; returns log weights.
  static Eigen::VectorXd log_recursion(const Eigen::VectorXd& log_nu,
                                       const Eigen::VectorXd& log1m_nu) {
    const int h_max = static_cast<int>(log_nu.size()) + 1;
    Eigen::VectorXd logw(h_max);
    double log_remaining = 0.0;  // log prod_{l<h} (1 - nu_l)
    for (int h = 0; h + 1 < h_max; ++h) {
      logw[h] = log_nu[h] + log_remaining;
      log_remaining += log1m_nu[h];
    }
    logw[h_max - 1] = log_remaining;  // nu_H = 1
    return logw;
  }

  static StickWeights from_log_fractions(const Eigen::VectorXd& log_nu,
                                         const Eigen::VectorXd& log1m_nu) {
    StickWeights sw;
    sw.w_ = log_recursion(log_nu, log1m_nu).array().exp();
    return sw;
  }

  static StickWeights from_fractions(const Eigen::VectorXd& nu) {
    StickWeights sw;
    const int h_max = static_cast<int>(nu.size()) + 1;
    sw.w_.resize(h_max);
    double remaining = 1.0;
    for (int h = 0; h + 1 < h_max; ++h) {
      sw.w_[h] = nu[h] * remaining;
      remaining *= 1.0 - nu[h];
    }
    sw.w_[h_max - 1] = remaining;
    return sw;
  }

 private:
  StickWeights() = default;
  Eigen::VectorXd w_;
};

// Logit stick fractions z'alpha_h for h = 1..H-1.
inline Eigen::VectorXd stick_logits(const std::vector<Eigen::VectorXd>& alphas,
                                    const Eigen::VectorXd& z) {
  Eigen::VectorXd u(alphas.size());
  for (std::size_t h = 0; h < alphas.size(); ++h) {
    if (alphas[h].size() != z.size())
      throw ConfigError("compute_weights: alpha_" + std::to_string(h + 1) +
                        " has length " + std::to_string(alphas[h].size()) +
                        " but z has length " + std::to_string(z.size()));
    u[h] = z.dot(alphas[h]);
  }
  return u;
}

inline Eigen::VectorXd log_stick_weights(
    const std::vector<Eigen::VectorXd>& alphas, const Eigen::VectorXd& z) {
  const Eigen::VectorXd u = stick_logits(alphas, z);
  Eigen::VectorXd log_nu(u.size()), log1m_nu(u.size());
  for (int h = 0; h < u.size(); ++h) {
    log_nu[h] = log_logistic(u[h]);
    log1m_nu[h] = log1m_logistic(u[h]);
  }
  return StickWeights::log_recursion(log_nu, log1m_nu);
}

// Covariate-dependent weights of the logit stick-breaking construction.
inline StickWeights compute_weights(const std::vector<Eigen::VectorXd>& alphas,
                                    const Eigen::VectorXd& z) {
  const Eigen::VectorXd u = stick_logits(alphas, z);
  Eigen::VectorXd log_nu(u.size()), log1m_nu(u.size());
  for (int h = 0; h < u.size(); ++h) {
    log_nu[h] = log_logistic(u[h]);
    log1m_nu[h] = log1m_logistic(u[h]);
  }
  return StickWeights::from_log_fractions(log_nu, log1m_nu);
}

// Covariate-free weights from explicit stick fractions (truncated DP path);
// fractions has length H with last entry 1.
inline StickWeights weights_from_sticks(const Eigen::VectorXd& fractions) {
  return StickWeights::from_fractions(fractions.head(fractions.size() - 1));
}

inline Eigen::VectorXd log_weights_from_sticks(
    const Eigen::VectorXd& fractions) {
  const int hm1 = static_cast<int>(fractions.size()) - 1;
  Eigen::VectorXd log_nu(hm1), log1m_nu(hm1);
  for (int h = 0; h < hm1; ++h) {
    log_nu[h] = std::log(fractions[h]);
    log1m_nu[h] = std::log1p(-fractions[h]);
  }
  return StickWeights::log_recursion(log_nu, log1m_nu);
}

}  // namespace lsbvar

#endif
