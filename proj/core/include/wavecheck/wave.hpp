#pragma once

#include <Eigen/Dense>

#include "wavecheck/graph.hpp"
#include "wavecheck/rng.hpp"
#include "wavecheck/tree_ball.hpp"

namespace wavecheck {

// Eigenvalue parameters for the d-regular tree.  x is the rescaled spectral
// coordinate lambda / (2 sqrt(d-1)); |x| <= 1 inside the tempered spectrum.
struct WaveParams {
  int d = 3;
  double lambda = 0.0;

  double x() const;
  double spectral_radius() const;  // 2 sqrt(d-1)
  bool in_spectrum() const;
};

// Chebyshev polynomial of the second kind, U_{-1} = 0, U_0 = 1, by the
// three-term recurrence (valid for every real x, including |x| = 1).
double chebyshev_u(int k, double x);

// Two-point function of the eigenvector process at tree distance k:
// f(0) = 1 and, for k >= 1,
//   f(k) = [sqrt((d-1)/d) U_k(x) - U_{k-2}(x)/sqrt(d(d-1))] / sqrt(d (d-1)^{k-1}).
double spherical_f(int k, const WaveParams& p);

// Gram matrix of spherical_f over tree distances, no spectrum check.
Eigen::MatrixXd wave_gram(const BallIndex& ball, const WaveParams& p);

// Covariance of the eigenvector process on a ball: entry (u,v) is
// spherical_f(dist(u,v)).  Throws std::domain_error outside the spectrum.
Eigen::MatrixXd covariance_matrix(const BallIndex& ball, const WaveParams& p);

// Direct sampler: one global factor of the covariance (symmetric
// eigendecomposition, negative eigenvalues clipped at zero).
class DirectWaveSampler {
 public:
  DirectWaveSampler(const BallIndex& ball, const WaveParams& p);
  Eigen::VectorXd draw(Rng& rng) const;
  int dim() const { return static_cast<int>(factor_.rows()); }

 private:
  Eigen::MatrixXd factor_;
};

// Markov sampler: seeds the central star (or edge) and extends outward one
// star at a time from the conditional law given the new star's inner edge.
class MarkovWaveSampler {
 public:
  MarkovWaveSampler(const BallIndex& ball, const WaveParams& p);
  Eigen::VectorXd draw(Rng& rng) const;

 private:
  const BallIndex* ball_;
  int d_;
  Eigen::MatrixXd seed_factor_;            // factor for the central star/edge
  std::vector<int> seed_vertices_;
  Eigen::RowVector2d cond_coeff_;          // children mean = a X_w + b X_v
  Eigen::MatrixXd cond_factor_;            // factor of the conditional covariance
  std::vector<std::vector<int>> children_;
  std::vector<int> extend_order_;          // vertices whose children get drawn
};

Eigen::VectorXd sample_wave_direct(const BallIndex& ball, const WaveParams& p, Rng& rng);
Eigen::VectorXd sample_wave_markov(const BallIndex& ball, const WaveParams& p, Rng& rng);

// Deterministic localized unit vector: spherical_f of the BFS distance from
// `center`, truncated strictly below radius r (support inside B_{r-1}).
Eigen::VectorXd localized_vector(const RegularGraph& g, int center, int r,
                                 const WaveParams& p);

// Radial kernel coefficients c_0..c_r (coefficient per distance).
struct KernelCoeffs {
  int r = 0;
  Eigen::VectorXd c;
  double objective = 0.0;  // minimal residual second moment at unit variance
};

// Minimizes E (sum_{v ~ o} Y_v - lambda Y_o)^2 over isotropic linear factors
// Y = sum_{|u| <= r} c_{|u|} Z_u of iid standard normals on the tree,
// subject to Var Y_o = 1.  Closed-form quadratic forms from sphere sizes;
// solved as a generalized symmetric eigenproblem.
KernelCoeffs linear_factor_coeffs(const WaveParams& p, int r);

// Applies the radial kernel to iid standard normals on the graph vertices
// (drawn in vertex order) and normalizes to a unit vector.
Eigen::VectorXd apply_local_kernel(const RegularGraph& g, const KernelCoeffs& kc,
                                   Rng& rng);

}  // namespace wavecheck
