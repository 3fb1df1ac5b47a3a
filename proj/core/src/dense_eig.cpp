#include "wavecheck/dense_eig.hpp"

#include <stdexcept>

#if defined(WAVECHECK_HAVE_LAPACKE)
#include <lapacke.h>
#endif

namespace wavecheck {

#if defined(WAVECHECK_HAVE_LAPACKE)

namespace {

void lapack_syevd(char jobz, Eigen::MatrixXd& a, Eigen::VectorXd& w) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  w.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n,
                                         a.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dsyevd failed to converge");
}

}  // namespace

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd a = m;
  Eigen::VectorXd w;
  lapack_syevd('N', a, w);
  return w;
}

void sym_eigen(const Eigen::MatrixXd& m, Eigen::VectorXd& evals,
               Eigen::MatrixXd& evecs) {
  evecs = m;
  lapack_syevd('V', evecs, evals);
}

#else

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

void sym_eigen(const Eigen::MatrixXd& m, Eigen::VectorXd& evals,
               Eigen::MatrixXd& evecs) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  evals = es.eigenvalues();
  evecs = es.eigenvectors();
}

#endif

}  // namespace wavecheck
