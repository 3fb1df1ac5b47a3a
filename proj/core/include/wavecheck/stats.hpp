#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace wavecheck {

// Standard normal CDF.
double normal_cdf(double x);

// One-sample Kolmogorov-Smirnov statistic against N(0, sigma), sigma > 0.
// Sorts a copy of the sample.
double ks_to_normal(const std::vector<double>& sample, double sigma);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic p-value for a two-sample KS statistic.
double ks_two_sample_p(double stat, std::size_t n, std::size_t m);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi2_sf(double x, double df);

// Digamma function, real argument > 0.
double digamma(double x);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

MeanStderr mean_stderr(const std::vector<double>& xs);

// Number of worker threads: WAVECHECK_THREADS if set (>=1), else the
// hardware concurrency.
unsigned worker_threads();

// Runs fn(i) for i in [0, n) on worker_threads() threads, contiguous chunks.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace wavecheck
