#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "wavecheck/tree_ball.hpp"
#include "wavecheck/wave.hpp"

namespace wavecheck {

// Invariant subspaces of the wave covariance on a ball under the
// root-fixing automorphisms:
//  - depth_constant: value depends on depth only (star balls);
//  - depth_symmetric / depth_antisymmetric: depth-dependent, equal or
//    opposite across the central edge (edge balls);
//  - sector: supported on the strict descendants of an interior anchor
//    vertex, constant on each (child branch, relative depth) class, classes
//    summing to zero at every relative depth.
enum class SubspaceKind { depth_constant, depth_symmetric, depth_antisymmetric, sector };

struct SubspaceBasis {
  SubspaceKind kind = SubspaceKind::depth_constant;
  int anchor = -1;          // anchor vertex for sector subspaces
  Eigen::MatrixXd basis;    // orthonormal columns
  std::string name;
};

long long subspace_dim(const BallIndex& ball, SubspaceKind kind, int anchor = -1);
SubspaceBasis subspace_basis(const BallIndex& ball, SubspaceKind kind, int anchor = -1);

// Every subspace with positive dimension; their dimensions add up to the
// ball size.
std::vector<SubspaceBasis> all_subspaces(const BallIndex& ball);

struct DecompositionReport {
  long long dim_total = 0;
  bool dims_complete = false;
  double max_invariance_defect = 0.0;  // max ||Sigma Q - Q (Q^T Sigma Q)|| / ||Sigma||
  double max_gram_defect = 0.0;        // max |U^T U - I| over the stacked bases
};

DecompositionReport verify_decomposition(const BallIndex& ball, const WaveParams& p);

// Closed-form eigenvalues of the matched covariance pair with index k >= 1:
// the ball of depths 0..k around a vertex (build_ball(star, d, k-1)) and the
// ball of depths 0..k-1 around an edge (build_ball(edge, d, k-1)).
//   i=1: depth-constant space, multiplicity 1
//   i=2: root sector space, multiplicity d-1
//   i=3: depth-symmetric space, multiplicity 1
//   i=4: depth-antisymmetric space, multiplicity 1
double eigenvalue_s(int i, int k, const WaveParams& p);

// log of the product of nonzero eigenvalues; eigenvalues above
// 1e-8 * max are retained and their count must equal expected_rank.
double logdet_sp(const Eigen::MatrixXd& m, long long expected_rank);

// Same quantity through a pivoted Cholesky factorization; destroys its
// argument.  Cheaper than the eigenvalue route on large rank-deficient
// matrices and algorithmically independent of it.
double logdet_sp_chol(Eigen::MatrixXd m, long long expected_rank);

struct SpectrumReport {
  int d = 3;
  double lambda = 0.0;
  int k = 1;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  double delta_closed = 0.0;
  std::optional<double> delta_brute;
};

std::string to_json_string(const SpectrumReport& r);

// delta(k) = logdet_sp Sigma_k - (d/2) logdet_sp Sigma'_k, computed in
// closed form (log s1 + (d-1) log s2 - (d/2)(log s3 + log s4)) and, when
// requested, by brute-force eigendecomposition of both covariances.
SpectrumReport delta_k(const WaveParams& p, int k, bool with_brute_force = true);

// Max absolute entry of the partial covariance between the two sides of the
// central edge given the edge values, for an arbitrary covariance on the
// ball (pseudo-inverse threshold 1e-10 * max eigenvalue of the edge block).
double partial_covariance_across_edge(const BallIndex& ball, const Eigen::MatrixXd& cov);

// The same for the wave covariance on build_ball(star, d, k); zero exactly
// when the process is 2-Markov.
double conditional_independence_check(const WaveParams& p, int k);

// Difference-functional coordinates: the centered star block at p plus one
// child-difference block per other interior vertex, oriented away from p.
struct QBlock {
  std::string name;
  int first_row = 0;
  int rows = 0;
};

struct QCoordinateSystem {
  Eigen::MatrixXd functionals;   // one row per coordinate, columns = vertices
  std::vector<QBlock> blocks;
  long long expected_dim = 0;    // dim W_lambda of the ball
  double max_cross_covariance = 0.0;  // between distinct blocks, under the wave Gram
  bool spans = false;            // rank of the coordinate covariance == expected_dim
  double min_kept_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

QCoordinateSystem q_coordinates(const BallIndex& ball, int p_vertex, const WaveParams& p);

}  // namespace wavecheck
