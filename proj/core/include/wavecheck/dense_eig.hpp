#pragma once

#include <Eigen/Dense>

namespace wavecheck {

// Eigenvalues of a dense symmetric matrix, ascending.
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& m);

// Full symmetric eigendecomposition, eigenvalues ascending.
void sym_eigen(const Eigen::MatrixXd& m, Eigen::VectorXd& evals,
               Eigen::MatrixXd& evecs);

}  // namespace wavecheck
