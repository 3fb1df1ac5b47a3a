#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavecheck/graph.hpp"
#include "wavecheck/rng.hpp"
#include "wavecheck/tree_ball.hpp"

namespace wavecheck {

// One random lift of a tree ball into a graph: image[p] is the graph vertex
// carrying ball vertex p.  At every interior ball vertex the images of its
// ball-neighbors enumerate the graph neighbors of its own image exactly once.
struct LiftSample {
  std::vector<int> image;
};

// Uniformly random lift: the root image is uniform on the vertices, the
// second root of an edge ball is a uniform neighbor, and every later step
// assigns a uniform bijection from a vertex's unmapped children onto the
// remaining graph neighbors of its image.  Throws std::invalid_argument on a
// degree mismatch.
LiftSample sample_lift(const RegularGraph& g, const BallIndex& ball, Rng& rng);

// Pullback through a lift: result(u) = scale * v(image(u)).
Eigen::VectorXd lift_pullback(const Eigen::VectorXd& v, const LiftSample& lift,
                              double scale);

// Local statistics of sqrt(n) v seen through random lifts of a ball.
struct LocalStatsReport {
  double sigma_hat = 0.0;  // KS-minimizing N(0, sigma) fit over [0, 1.2]
  double ks = 0.0;         // KS distance of the entries to N(0, sigma_hat);
                           // mass-at-zero fraction when sigma_hat is 0
  bool sigma_degenerate = false;  // sigma_hat numerically zero
  double residual_value = 0.0;    // ||Av - lambda v|| of the input pair
  Eigen::MatrixXd emp_cov;        // empirical lifted covariance, m samples
  Eigen::MatrixXd model_cov;      // sigma_hat^2 * wave covariance on the ball
  Eigen::MatrixXd cov_stderr;     // per-entry standard error of emp_cov
  double cov_dev = 0.0;           // max-abs entry of emp_cov - model_cov
  double cov_dev_stderr = 0.0;    // stderr of the entry attaining cov_dev
  double dist1_cov = 0.0;         // per-lift mean over adjacent pairs, averaged
  double dist1_stderr = 0.0;
  std::int64_t lifts = 0;
};

// Fits sigma_hat to the entry distribution of sqrt(n) v (grid search over
// [0, 1.2] with a point mass at zero as an explicit candidate, then a finer
// local pass), draws m lifts of `ball`, and compares the empirical pullback
// covariance with sigma_hat^2 times the eigenvector-process covariance at
// eigenvalue lambda.  Throws std::domain_error when lambda lies outside the
// tree spectrum (the model covariance does not exist there).
LocalStatsReport local_stats(const RegularGraph& g, const Eigen::VectorXd& v,
                             double lambda, const BallIndex& ball,
                             std::int64_t m, Rng& rng);

// Star/edge entropy inequality at radius zero for one shared coloring: every
// vertex is colored by the noisy rounding of sqrt(n) v_i, star lifts collect
// ordered (root, d neighbors) color tuples and edge lifts ordered pairs, and
//   lhs  = H(star tuples) - (d/2) H(edge tuples)        (plug-in entropies)
//   rhs  = mean over vertices of the exact rounding entropy at sqrt(n) v_i.
struct EntropyInequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // lhs - rhs
  double stderr_ = 0.0;
  double star_entropy = 0.0;
  double edge_entropy = 0.0;
  std::int64_t lifts = 0;
};

// One coloring draw, m star lifts and m edge lifts.  Throws
// std::invalid_argument when the tuple histogram would exceed 1e7 bins.
EntropyInequalityReport entropy_inequality_check(const RegularGraph& g,
                                                 const Eigen::VectorXd& v,
                                                 double sigma, int a,
                                                 std::int64_t m, Rng& rng);

// Repeats the check over independent colorings; margin is the mean of the
// per-coloring margins with its standard error across colorings.
struct EntropyInequalityAggregate {
  std::vector<EntropyInequalityReport> checks;
  double margin = 0.0;
  double margin_stderr = 0.0;
};

EntropyInequalityAggregate entropy_inequality_experiment(
    const RegularGraph& g, const Eigen::VectorXd& v, double sigma, int a,
    std::int64_t m, int colorings, Rng& rng);

std::string to_json_string(const LocalStatsReport& r, std::uint64_t seed);
std::string to_json_string(const EntropyInequalityAggregate& r,
                           std::uint64_t seed);

}  // namespace wavecheck
