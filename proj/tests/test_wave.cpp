#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wavecheck/dense_eig.hpp"
#include "wavecheck/graph.hpp"
#include "wavecheck/rng.hpp"
#include "wavecheck/tree_ball.hpp"
#include "wavecheck/wave.hpp"

using namespace wavecheck;

TEST_CASE("chebyshev polynomials satisfy the defining recurrence") {
  for (double x : {-0.9, -0.3, 0.0, 0.4, 1.0}) {
    CHECK(chebyshev_u(0, x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(chebyshev_u(1, x) == doctest::Approx(2.0 * x).epsilon(1e-15));
    for (int k = 2; k <= 20; ++k) {
      CHECK(chebyshev_u(k, x) ==
            doctest::Approx(2.0 * x * chebyshev_u(k - 1, x) - chebyshev_u(k - 2, x))
                .epsilon(1e-11));
    }
  }
  CHECK(chebyshev_u(7, 1.0) == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("two-point function starts at the known low-order values") {
  for (int d : {3, 4, 5}) {
    for (double lambda : {0.0, 1.0, -1.5, 2.0}) {
      const WaveParams p{d, lambda};
      CHECK(spherical_f(0, p) == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(spherical_f(1, p) == doctest::Approx(lambda / d).epsilon(1e-14));
      CHECK(spherical_f(2, p) ==
            doctest::Approx((lambda * lambda - d) / (d * (d - 1.0))).epsilon(1e-14));
    }
  }
}

TEST_CASE("two-point function satisfies the transfer recurrence") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 3 + static_cast<int>(rng.below(4));
    const double lambda = (rng.uniform() * 2.0 - 1.0) * 2.0 * std::sqrt(d - 1.0);
    const WaveParams p{d, lambda};
    for (int k = 1; k <= 30; ++k) {
      const double lhs = lambda * spherical_f(k, p);
      const double rhs = spherical_f(k - 1, p) + (d - 1.0) * spherical_f(k + 1, p);
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("spectrum membership uses the tree spectral radius") {
  const double r = 2.0 * std::sqrt(2.0);
  CHECK(WaveParams{3, 0.0}.in_spectrum());
  CHECK(WaveParams{3, r}.in_spectrum());
  CHECK(!WaveParams{3, r + 1e-6}.in_spectrum());
  CHECK(WaveParams{3, 1.0}.spectral_radius() == doctest::Approx(r).epsilon(1e-15));
  CHECK(WaveParams{3, 1.0}.x() == doctest::Approx(1.0 / r).epsilon(1e-15));
}

TEST_CASE("ball covariance is unit-diagonal distance-stationary and psd") {
  const BallIndex ball = build_ball(BallKind::star, 3, 2);
  const WaveParams p{3, 1.2};
  const Eigen::MatrixXd cov = covariance_matrix(ball, p);
  for (int u = 0; u < ball.size(); ++u) {
    CHECK(cov(u, u) == doctest::Approx(1.0).epsilon(1e-14));
    for (int v = 0; v < u; ++v) {
      CHECK(cov(u, v) ==
            doctest::Approx(spherical_f(tree_distance(ball, u, v), p)).epsilon(1e-13));
      CHECK(cov(u, v) == doctest::Approx(cov(v, u)).epsilon(1e-15));
    }
  }
  CHECK(sym_eigenvalues(cov).minCoeff() > -1e-11);
}

namespace {

// max interior eigenvector-equation residual of one sampled field
double interior_residual(const BallIndex& ball, const WaveParams& p,
                         const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (int v : interior_vertices(ball)) {
    double sum = 0.0;
    for (int w : ball.adj[v]) sum += x[w];
    worst = std::max(worst, std::abs(sum - p.lambda * x[v]));
  }
  return worst;
}

}  // namespace

TEST_CASE("direct sampler draws satisfy the eigenvector equation") {
  const BallIndex ball = build_ball(BallKind::star, 3, 2);
  const WaveParams p{3, 1.0};
  DirectWaveSampler sampler(ball, p);
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    CHECK(interior_residual(ball, p, sampler.draw(rng)) < 1e-8);
  }
}

TEST_CASE("markov sampler draws satisfy the eigenvector equation") {
  const BallIndex ball = build_ball(BallKind::star, 3, 2);
  const WaveParams p{3, 1.0};
  MarkovWaveSampler sampler(ball, p);
  Rng rng(37);
  for (int i = 0; i < 200; ++i) {
    CHECK(interior_residual(ball, p, sampler.draw(rng)) < 1e-8);
  }
}

TEST_CASE("both samplers reproduce the model covariance") {
  const BallIndex ball = build_ball(BallKind::edge, 3, 1);
  const WaveParams p{3, -0.8};
  const Eigen::MatrixXd cov = covariance_matrix(ball, p);
  const int n = ball.size();
  const int draws = 40000;
  for (int use_markov = 0; use_markov < 2; ++use_markov) {
    Rng rng(41 + use_markov);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < draws; ++i) {
      const Eigen::VectorXd x = use_markov ? sample_wave_markov(ball, p, rng)
                                           : sample_wave_direct(ball, p, rng);
      acc += x * x.transpose();
    }
    acc /= draws;
    // second-moment stderr is about sqrt(2/draws) on unit-variance entries
    CHECK((acc - cov).cwiseAbs().maxCoeff() < 8.0 * std::sqrt(2.0 / draws));
  }
}

TEST_CASE("localized vector is unit norm and supported in the small ball") {
  Rng grng(43);
  const RegularGraph g = random_regular(600, 3, grng);
  const WaveParams p{3, 1.0};
  const int center = 17;
  const int r = 4;
  const Eigen::VectorXd v = localized_vector(g, center, r, p);
  CHECK(std::abs(v.norm() - 1.0) < 1e-12);

  // graph distance from the center
  std::vector<int> dist(g.n, -1);
  std::vector<int> frontier{center};
  dist[center] = 0;
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int u : frontier) {
      for (int w : g.adj[u]) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          next.push_back(w);
        }
      }
    }
    frontier = std::move(next);
  }
  int support = 0;
  for (int u = 0; u < g.n; ++u) {
    if (v[u] != 0.0) {
      ++support;
      CHECK(dist[u] < r);
    }
  }
  CHECK(support > 0);
}

TEST_CASE("radial kernel coefficients minimize the residual objective") {
  const WaveParams p{3, 1.0};
  double prev = 1e30;
  for (int r = 1; r <= 4; ++r) {
    const KernelCoeffs kc = linear_factor_coeffs(p, r);
    CHECK(kc.r == r);
    CHECK(kc.c.size() == r + 1);
    CHECK(kc.objective >= -1e-12);
    CHECK(kc.objective <= prev + 1e-12);  // richer kernels fit at least as well
    prev = kc.objective;
  }
}

TEST_CASE("kernel vector is unit norm with residual near the objective") {
  Rng grng(47);
  const RegularGraph g = random_regular(2000, 3, grng);
  const WaveParams p{3, 1.0};
  const KernelCoeffs kc = linear_factor_coeffs(p, 3);
  Rng rng(53);
  const Eigen::VectorXd v = apply_local_kernel(g, kc, rng);
  CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  double res2 = 0.0;
  for (int u = 0; u < g.n; ++u) {
    double sum = 0.0;
    for (int w : g.adj[u]) sum += v[w];
    res2 += (sum - p.lambda * v[u]) * (sum - p.lambda * v[u]);
  }
  // residual^2 concentrates near the tree objective at unit norm
  CHECK(std::abs(std::sqrt(res2) - std::sqrt(kc.objective)) < 0.1);
}

TEST_CASE("wave gram equals the covariance but skips the spectrum check") {
  const BallIndex ball = build_ball(BallKind::star, 3, 1);
  const WaveParams in{3, 0.5};
  CHECK((wave_gram(ball, in) - covariance_matrix(ball, in)).cwiseAbs().maxCoeff() == 0.0);
  const WaveParams out{3, 2.9};
  CHECK_THROWS_AS(covariance_matrix(ball, out), std::domain_error);
  CHECK(wave_gram(ball, out).rows() == ball.size());
}
