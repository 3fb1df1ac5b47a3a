#include "wavecheck/frame.hpp"

#include <cmath>
#include <stdexcept>

namespace wavecheck {

FrameDecomposition frame_decomposition(int d, double lambda) {
  if (d < 3) throw std::invalid_argument("frame_decomposition: d must be >= 3");
  if (std::abs(lambda) > 2.0 * std::sqrt(d - 1.0) * (1.0 + 1e-12))
    throw std::domain_error("frame_decomposition: |lambda| exceeds 2 sqrt(d-1)");

  FrameDecomposition f;
  f.d = d;
  f.lambda = lambda;
  const double c = lambda / d;
  f.s = std::sqrt(1.0 - c * c);
  f.t1 = (2.0 / d - 1.0 + f.s) / (2.0 * f.s);
  f.t2 = 1.0 - f.t1;

  f.w = Eigen::VectorXd::Zero(d);
  f.w(d - 1) = 1.0;

  // Regular simplex in w^perp: u_i = sqrt(d/(d-1)) * (column i of the
  // Helmert basis of the sum-zero hyperplane), so (u_i, u_j) = -1/(d-1).
  Eigen::MatrixXd helmert = Eigen::MatrixXd::Zero(d - 1, d);
  for (int r = 1; r < d; ++r) {
    for (int j = 0; j < r; ++j) helmert(r - 1, j) = 1.0;
    helmert(r - 1, r) = -static_cast<double>(r);
    helmert.row(r - 1) /= std::sqrt(static_cast<double>(r) * (r + 1));
  }
  f.v = Eigen::MatrixXd::Zero(d, d);
  const double scale = f.s * std::sqrt(static_cast<double>(d) / (d - 1.0));
  f.v.topRows(d - 1) = scale * helmert;
  f.v.row(d - 1).setConstant(c);

  const double u = 1.0 / std::sqrt(1.0 + c);
  const double t = 1.0 / std::sqrt(1.0 - c);
  const double alpha = (u + t) / 2.0;
  const double beta = (u - t) / 2.0;
  f.a = alpha * f.w.replicate(1, d) + beta * f.v;
  f.b = alpha * f.v + beta * f.w.replicate(1, d);
  return f;
}

double frame_sum_defect(const FrameDecomposition& f) {
  return (f.v.rowwise().sum() - f.lambda * f.w).cwiseAbs().maxCoeff();
}

double umbrella_defect(const FrameDecomposition& f) {
  const double c2 = (f.lambda / f.d) * (f.lambda / f.d);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(f.d, f.d);
  const Eigen::MatrixXd ww = f.w * f.w.transpose();
  const Eigen::MatrixXd expected =
      (1.0 - c2) * f.d / (f.d - 1.0) * (id - ww) + c2 * f.d * ww;
  return (f.v * f.v.transpose() - expected).cwiseAbs().maxCoeff();
}

double reconstruction_defect(const FrameDecomposition& f) {
  const Eigen::MatrixXd m =
      f.t1 * f.a * f.a.transpose() + f.t2 * f.b * f.b.transpose();
  return (m - Eigen::MatrixXd::Identity(f.d, f.d)).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd frame_gram(const FrameDecomposition& f) {
  Eigen::MatrixXd all(f.d, f.d + 1);
  all.col(0) = f.w;
  all.rightCols(f.d) = f.v;
  return all.transpose() * all;
}

}  // namespace wavecheck
