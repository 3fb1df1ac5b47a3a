#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>

#include "wavecheck/graph.hpp"
#include "wavecheck/rng.hpp"

namespace wavecheck {

// dense: all eigenpairs (n <= 4096); dense_values: all eigenvalues, no
// vectors (histogram work); extreme: top/bottom 8 pairs via Lanczos with
// full reorthogonalization.
enum class EigMode { dense, dense_values, extreme };

struct SpectralData {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, one per eigenvalue
                                 // reported; empty in dense_values mode
  EigMode mode = EigMode::dense;
};

// seed feeds the Lanczos start vector; ignored in dense modes.
SpectralData eigendecompose(const RegularGraph& g, EigMode mode, std::uint64_t seed = 1);

// Largest |eigenvalue| after deflating one constant vector.  For a
// disconnected graph this reports d (the second locally-constant
// eigenvector survives deflation); *disconnected is set accordingly.
double lambda2(const RegularGraph& g, bool* disconnected = nullptr);

// ||A v - lambda v||_2 for unit v (throws if |v| deviates from 1 by > 1e-8).
double residual(const RegularGraph& g, const Eigen::VectorXd& v, double lambda);

// Unit-norm Gaussian combination of the non-constant eigenvectors with
// eigenvalue in [lambda - eps, lambda + eps]; the residual is <= eps by
// construction and the entry sum vanishes.
Eigen::VectorXd spectral_window_vector(const SpectralData& sd, double lambda, double eps,
                                       Rng& rng);

// Checks |lambda| <= lambda2 + eps + 1e-6 for an almost eigenvector that is
// orthogonal to the constant vector; precondition failures are reported in
// the flags rather than thrown.
struct AlmostEigReport {
  double entry_sum = 0.0;
  double residual_value = 0.0;
  double lambda2_value = 0.0;
  bool sum_ok = false;       // |sum of entries| <= 1e-8
  bool residual_ok = false;  // residual <= eps
  bool holds = false;
};

AlmostEigReport almost_eig_bound_check(const RegularGraph& g, const Eigen::VectorXd& v,
                                       double lambda, double eps);

// Limiting spectral density of random d-regular graphs on
// [-2 sqrt(d-1), 2 sqrt(d-1)].
double kesten_mckay_density(int d, double x);

// Total-variation distance between the eigenvalue histogram (one constant
// eigenvalue removed) and the binned limiting density; spectral mass
// outside the support counts fully.
double kesten_mckay_distance(const SpectralData& sd, int d, int bins);

// One "lambda" column; optionally appends the eigenvector components.
void write_spectrum_csv(const SpectralData& sd, std::ostream& os, bool with_vectors = false);

}  // namespace wavecheck
