#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "wavecheck/rng.hpp"
#include "wavecheck/wave.hpp"

namespace wavecheck {

enum class EntropyMethod { closed_form, knn, plug_in };

struct EntropyEstimate {
  double value = 0.0;
  double stderr_ = 0.0;  // 0 for closed forms
  EntropyMethod method = EntropyMethod::closed_form;
};

// Differential entropy of a (possibly degenerate) Gaussian inside its
// support subspace: (m log(2 pi e) + logdet_sp(cov, m)) / 2.
EntropyEstimate gaussian_entropy_sp(const Eigen::MatrixXd& cov, long long expected_rank);

// Nearest-neighbor differential entropy (Kozachenko-Leonenko), k-th
// neighbor, natural log.  samples: one point per row, n >= 100 points in
// <= 8 dimensions.  Ties are broken by a deterministic 1e-12 jitter;
// rank-deficient clouds (smallest covariance eigenvalue < 1e-10 * largest)
// are rejected - project them first.
EntropyEstimate knn_entropy(const Eigen::MatrixXd& samples, int k = 4);

// Randomized rounding onto the grid {r/a : |r| <= a^2} after adding
// Gaussian noise of scale sigma.
struct DiscretizationParams {
  double sigma = 0.0;
  int a = 1;
};

double discretize_t(double x, const DiscretizationParams& dp, Rng& rng);

// Exact pmf of the rounding applied to N(mean, sd^2) (sd = 0 means a point
// mass), indexed by r + a^2 for grid point r/a.
std::vector<double> rounded_normal_pmf(double mean, double sd, int a);

double discrete_entropy(const std::vector<double>& probs);

// Entropy of the rounded N(mean, sd^2); the sigma-noised rounding of a
// fixed x is rounded_normal_entropy(x, sigma, a).
double rounded_normal_entropy(double mean, double sd, int a);

// Empirical Shannon entropy from histogram counts.  stderr combines the
// sampling term with the (K-1)/(2n) plug-in bias scale.
EntropyEstimate plug_in_entropy(const std::vector<long long>& counts);

// One row per grid step a: plug-in entropy of the coordinatewise rounding
// of X + sigma-noise, shifted by dim*log a, against the differential
// entropy of X + sigma N (closed form if supplied, else knn-estimated).
// |gap| shrinks as a grows.
struct LadderRow {
  int a = 0;
  EntropyEstimate discrete;
  double shifted = 0.0;
  double target = 0.0;
  double gap = 0.0;  // shifted - target
};

std::vector<LadderRow> discretization_ladder_check(
    const std::function<Eigen::VectorXd(Rng&)>& sample_x, int dim, double sigma,
    const std::vector<int>& a_ladder, long long samples,
    std::optional<double> target, Rng& rng);

// Entropy functional of a star tuple: samples are rows in ball order
// (center, then the d neighbors) and must satisfy the eigenvector
// constraint sum(neighbors) = lambda * center to 1e-8.  Returns
// D = D_sp(tuple) - (d/2) D(center, first neighbor), estimated by mapping
// onto fixed whitened coordinates of the wave covariance and running the
// nearest-neighbor estimator there.
EntropyEstimate functional_D(const Eigen::MatrixXd& samples, const WaveParams& p);

// Closed form of the same functional for the Gaussian wave itself.
double functional_D_gaussian(const WaveParams& p);

// Mixture of Gaussians in 1 or 2 dimensions with its heat flow
// cov -> cov + 2t I.
struct GaussianMixture {
  std::vector<double> weights;           // positive, sum 1
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;     // positive definite
  int dim() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }
};

GaussianMixture heat(const GaussianMixture& gm, double t);
double mixture_entropy(const GaussianMixture& gm);
double mixture_fisher(const GaussianMixture& gm);  // integral of |grad f|^2 / f

// Heat-flow identity d/dt entropy(f_t) = fisher(f_t): central finite
// difference of the entropy against the Fisher integral at each t.
struct DeBruijnRow {
  double t = 0.0;
  double entropy = 0.0;
  double entropy_derivative = 0.0;
  double fisher = 0.0;
  double rel_err = 0.0;
};

std::vector<DeBruijnRow> debruijn_check(const GaussianMixture& gm,
                                        const std::vector<double>& t_grid);

// Gaussian entropy submodularity h(X,Y,Z) <= h(X,Z) + h(Y,Z) - h(Z) via
// closed-form log-dets; equality detected when X and Y are conditionally
// independent given Z.
struct SubmodularityReport {
  double h_xyz = 0.0, h_xz = 0.0, h_yz = 0.0, h_z = 0.0;
  double gap = 0.0;  // rhs - lhs, nonnegative
  bool holds = false;
  bool equality = false;
};

SubmodularityReport submodularity_check(const Eigen::MatrixXd& cov, int nx, int ny, int nz);

}  // namespace wavecheck
