#ifndef LSBVAR_LINALG_HPP
#define LSBVAR_LINALG_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "lsbvar/errors.hpp"

namespace lsbvar {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Coefficient matrices are flattened row by row: a k x p matrix M maps to
// (M_11,...,M_1p, M_21,...,M_2p, ..., M_k1,...,M_kp). Under this convention
// the Gaussian full conditionals take the kron(Sigma^-1, X'X) form used
// throughout the sampler.
inline VectorXd vec_rowmajor(const MatrixXd& m) {
  VectorXd v(m.size());
  int idx = 0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) v[idx++] = m(r, c);
  return v;
}

inline MatrixXd unvec_rowmajor(const VectorXd& v, int rows, int cols) {
  if (v.size() != rows * cols)
    throw NumericalError("unvec_rowmajor: size mismatch");
  MatrixXd m(rows, cols);
  int idx = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = v[idx++];
  return m;
}

inline MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline MatrixXd symmetrize(const MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

// Cholesky with a hard failure; every full-conditional precision and scale in
// the sampler must factorize, so a failure here means a real numerical bug.
inline Eigen::LLT<MatrixXd> cholesky(const MatrixXd& m,
                                     const std::string& what) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError("matrix not positive definite: " + what);
  return llt;
}

inline bool is_spd(const MatrixXd& m, double sym_tol = 1e-8) {
  if (m.rows() != m.cols()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() >
      sym_tol * (1.0 + m.cwiseAbs().maxCoeff()))
    return false;
  return Eigen::LLT<MatrixXd>(m).info() == Eigen::Success;
}

inline MatrixXd spd_inverse(const MatrixXd& m, const std::string& what) {
  auto llt = cholesky(m, what);
  return symmetrize(
      llt.solve(MatrixXd::Identity(m.rows(), m.cols())));
}

inline double log_det_from_llt(const Eigen::LLT<MatrixXd>& llt) {
  return 2.0 * MatrixXd(llt.matrixL()).diagonal().array().log().sum();
}

}  // namespace lsbvar

#endif
