#pragma once

#include <Eigen/Dense>

namespace wavecheck {

// Unit-vector frame in R^d attached to an eigenvalue lambda: a distinguished
// direction w plus d unit vectors v_i with (v_i, w) = lambda/d,
// (v_i, v_j) = (lambda^2 - d)/(d(d-1)) and sum_i v_i = lambda w.  The mixed
// vectors a_i, b_i split every squared norm with weights t1, t2.
struct FrameDecomposition {
  int d = 0;
  double lambda = 0.0;
  double s = 0.0;   // sqrt(1 - (lambda/d)^2), sine of the cone angle
  double t1 = 0.0;  // weight of the w-heavy system, (2/d - 1 + s) / (2s)
  double t2 = 0.0;  // 1 - t1
  Eigen::VectorXd w;
  Eigen::MatrixXd v;  // column i = v_i
  Eigen::MatrixXd a;  // column i = alpha w + beta v_i, (a_i, w)^2 = (1+s)/2
  Eigen::MatrixXd b;  // column i = alpha v_i + beta w, (b_i, w)^2 = (1-s)/2
};

// Throws std::domain_error when |lambda| > 2 sqrt(d-1) (t1 leaves [0,1]).
FrameDecomposition frame_decomposition(int d, double lambda);

// max |sum_i v_i - lambda w|.
double frame_sum_defect(const FrameDecomposition& f);

// Deviation of sum_i v_i v_i^T from its rotation-invariant form
// (1 - (lambda/d)^2) d/(d-1) (I - w w^T) + (lambda/d)^2 d w w^T.
double umbrella_defect(const FrameDecomposition& f);

// Deviation of t1 sum_i a_i a_i^T + t2 sum_i b_i b_i^T from the identity;
// zero means |x|^2 = sum_i (t1 (x,a_i)^2 + t2 (x,b_i)^2) for every x.
double reconstruction_defect(const FrameDecomposition& f);

// Gram matrix of (w, v_1..v_d); matches the wave covariance of a radius-0
// star ball in the order (center, neighbors).
Eigen::MatrixXd frame_gram(const FrameDecomposition& f);

}  // namespace wavecheck
