#ifndef LSBVAR_DISTRIBUTIONS_HPP
#define LSBVAR_DISTRIBUTIONS_HPP

#include <cmath>
#include <limits>

#include "lsbvar/linalg.hpp"
#include "lsbvar/rng.hpp"

namespace lsbvar {

inline VectorXd draw_std_normal(int n, RngStream& rng) {
  VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();
  return z;
}

inline VectorXd draw_mvn(const VectorXd& mean, const MatrixXd& cov,
                         RngStream& rng) {
  auto llt = cholesky(cov, "mvn covariance");
  return mean + MatrixXd(llt.matrixL()) * draw_std_normal(mean.size(), rng);
}

// Draw from N(P^-1 m, P^-1) given the natural parameters (m, P). With
// P = L L', the noise part L^-T z has covariance exactly P^-1.
inline VectorXd draw_mvn_precision(const VectorXd& lin, const MatrixXd& prec,
                                   RngStream& rng) {
  auto llt = cholesky(prec, "full-conditional precision");
  VectorXd mean = llt.solve(lin);
  VectorXd z = draw_std_normal(lin.size(), rng);
  return mean + llt.matrixU().solve(z);
}

inline double mvn_logpdf(const VectorXd& x, const VectorXd& mean,
                         const Eigen::LLT<MatrixXd>& cov_llt) {
  const int d = static_cast<int>(x.size());
  VectorXd r = cov_llt.matrixL().solve(x - mean);
  return -0.5 * (d * std::log(2.0 * M_PI) + log_det_from_llt(cov_llt) +
                 r.squaredNorm());
}

inline double mvn_logpdf(const VectorXd& x, const VectorXd& mean,
                         const MatrixXd& cov) {
  return mvn_logpdf(x, mean, cholesky(cov, "mvn_logpdf covariance"));
}

// Wishart(df, S) with E[W] = df * S, via the Bartlett decomposition.
inline MatrixXd draw_wishart(double df, const MatrixXd& scale,
                             RngStream& rng) {
  const int d = static_cast<int>(scale.rows());
  if (!(df > d - 1))
    throw NumericalError("wishart: dof must exceed dim - 1");
  auto llt = cholesky(scale, "wishart scale");
  MatrixXd a = MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(df - i));
    for (int j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  MatrixXd la = MatrixXd(llt.matrixL()) * a;
  return symmetrize(la * la.transpose());
}

// Inverse-Wishart(df, Psi) with density |S|^{-(df+d+1)/2} exp(-tr(Psi S^-1)/2)
// and mean Psi / (df - d - 1).
inline MatrixXd draw_inverse_wishart(double df, const MatrixXd& psi,
                                     RngStream& rng) {
  MatrixXd w = draw_wishart(df, spd_inverse(psi, "inverse-wishart scale"), rng);
  return spd_inverse(w, "inverse-wishart draw");
}

inline double log_norm_cdf(double x) {
  if (x < -8.0) {
    // asymptotic tail, avoids erfc underflow
    return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * M_PI);
  }
  return std::log(0.5 * std::erfc(-x * M_SQRT1_2));
}

namespace detail {

// Piecewise coefficients of the alternating series for the Jacobi-type
// density underlying PG(1, .); t is the left/right switch point 2/pi.
inline double pg_coef(int n, double x, double t) {
  const double np = n + 0.5;
  double logf;
  if (x <= t) {
    logf = std::log(M_PI) + std::log(np) +
           1.5 * (std::log(2.0 / M_PI) - std::log(x)) - 2.0 * np * np / x;
  } else {
    logf = std::log(M_PI) + std::log(np) - 0.5 * x * M_PI * M_PI * np * np;
  }
  return std::exp(logf);
}

// Inverse-Gaussian(mu, 1) by the Michael-Schucany-Haas transform.
inline double draw_invgauss(double mu, RngStream& rng) {
  const double u = rng.normal();
  const double v = u * u;
  double out = mu + 0.5 * mu * (mu * v - std::sqrt(4.0 * mu * v + mu * mu * v * v));
  if (rng.uniform() > mu / (mu + out)) out = mu * mu / out;
  return out;
}

// chi^2_1 truncated to (1/t, inf) = (pi/2, inf); used through its reciprocal.
inline double draw_trunc_chisq1(RngStream& rng) {
  const double lo = 0.5 * M_PI;
  for (;;) {
    const double x = 2.0 * rng.exponential() + lo;
    if (rng.uniform() <= std::sqrt(lo / x)) return x;
  }
}

// Inverse-Gaussian(1/z, 1) truncated to (0, t); valid for z = 0 as well.
inline double draw_trunc_invgauss(double z, double t, RngStream& rng) {
  if (z < 1.0 / t) {
    for (;;) {
      const double x = 1.0 / draw_trunc_chisq1(rng);
      if (std::log(rng.uniform()) < -0.5 * z * z * x) return x;
    }
  }
  const double mu = 1.0 / z;
  for (;;) {
    const double x = draw_invgauss(mu, rng);
    if (x < t) return x;
  }
}

}  // namespace detail

// Exact draw from the Polya-Gamma distribution PG(1, c): the alternating
// series accelerated rejection sampler with an inverse-Gaussian/exponential
// proposal mixture. E[PG(1, c)] = tanh(c/2) / (2c).
inline double sample_polya_gamma(double c, RngStream& rng) {
  const double z = 0.5 * std::fabs(c);
  const double t = 2.0 / M_PI;
  const double k = 0.125 * M_PI * M_PI + 0.5 * z * z;
  // ratio = p/(p+q) where p is the mass of the exponential right piece and
  // q the mass of the inverse-Gaussian left piece of the proposal
  const double log_a = std::log(4.0) - std::log(M_PI) - z;
  const double half_pi_sqrt = std::sqrt(0.5 * M_PI);
  const double log_q1 = log_a + log_norm_cdf(half_pi_sqrt * (t * z - 1.0)) +
                        std::log(k) + k * t;
  const double log_q2 = log_a + 2.0 * z +
                        log_norm_cdf(-half_pi_sqrt * (t * z + 1.0)) +
                        std::log(k) + k * t;
  const double q_over_p = std::exp(log_q1) + std::exp(log_q2);
  const double ratio = 1.0 / (1.0 + q_over_p);

  for (;;) {
    double x;
    if (rng.uniform() < ratio) {
      x = t + rng.exponential() / k;
    } else {
      x = detail::draw_trunc_invgauss(z, t, rng);
    }
    // squeeze on the partial sums of the alternating series
    double s = detail::pg_coef(0, x, t);
    const double y = rng.uniform() * s;
    int n = 0;
    for (;;) {
      ++n;
      if (n % 2 == 1) {
        s -= detail::pg_coef(n, x, t);
        if (y <= s) return 0.25 * x;
      } else {
        s += detail::pg_coef(n, x, t);
        if (y > s) break;
      }
    }
  }
}

inline double polya_gamma_mean(double c) {
  if (std::fabs(c) < 1e-8) return 0.25;
  return std::tanh(0.5 * c) / (2.0 * c);
}

}  // namespace lsbvar

#endif
