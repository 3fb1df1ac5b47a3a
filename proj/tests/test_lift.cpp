#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <vector>

#include "json.hpp"
#include "wavecheck/eigenlab.hpp"
#include "wavecheck/graph.hpp"
#include "wavecheck/entropy.hpp"
#include "wavecheck/lift.hpp"
#include "wavecheck/rng.hpp"
#include "wavecheck/stats.hpp"
#include "wavecheck/tree_ball.hpp"
#include "wavecheck/wave.hpp"

using namespace wavecheck;

TEST_CASE("lifts preserve adjacency around every interior vertex") {
  Rng rng(7);
  const RegularGraph g = random_regular(60, 3, rng);
  for (BallKind kind : {BallKind::star, BallKind::edge}) {
    const BallIndex ball = build_ball(kind, 3, 2);
    for (int rep = 0; rep < 100; ++rep) {
      const LiftSample lift = sample_lift(g, ball, rng);
      REQUIRE(static_cast<int>(lift.image.size()) == ball.size());
      for (int p = 0; p < ball.size(); ++p) {
        if (ball.boundary[p]) continue;
        // neighbors of p map exactly onto the graph neighbors of image[p]
        std::multiset<int> want(g.adj[lift.image[p]].begin(), g.adj[lift.image[p]].end());
        std::multiset<int> got;
        for (int q : ball.adj[p]) got.insert(lift.image[q]);
        REQUIRE(want == got);
      }
    }
  }
}

TEST_CASE("lift root and branch images are uniform over the graph") {
  Rng rng(11);
  const int n = 100;
  const RegularGraph g = random_regular(n, 3, rng);
  const BallIndex ball = build_ball(BallKind::star, 3, 1);
  std::vector<long long> root_counts(n, 0), branch_counts(n, 0);
  const long long m = 60000;
  for (long long i = 0; i < m; ++i) {
    const LiftSample lift = sample_lift(g, ball, rng);
    ++root_counts[lift.image[0]];
    ++branch_counts[lift.image[3]];
  }
  const auto chi2 = [&](const std::vector<long long>& counts) {
    const double expect = static_cast<double>(m) / n;
    double s = 0.0;
    for (long long c : counts) s += (c - expect) * (c - expect) / expect;
    return s;
  };
  CHECK(chi2_sf(chi2(root_counts), n - 1.0) > 1e-4);
  CHECK(chi2_sf(chi2(branch_counts), n - 1.0) > 1e-4);
}

TEST_CASE("pullback of an exact eigenvector satisfies the local equation") {
  Rng rng(13);
  const RegularGraph g = random_regular(200, 3, rng);
  const SpectralData sd = eigendecompose(g, EigMode::dense);
  const Eigen::VectorXd v = sd.eigenvectors.col(50);
  const double lambda = sd.eigenvalues(50);
  const BallIndex ball = build_ball(BallKind::star, 3, 2);
  for (int rep = 0; rep < 50; ++rep) {
    const LiftSample lift = sample_lift(g, ball, rng);
    const Eigen::VectorXd x = lift_pullback(v, lift, std::sqrt(200.0));
    for (int p = 0; p < ball.size(); ++p) {
      if (ball.boundary[p]) continue;
      double sum = 0.0;
      for (int q : ball.adj[p]) sum += x[q];
      CHECK(std::abs(sum - lambda * x[p]) < 1e-10);
    }
  }
}

TEST_CASE("star and edge pullbacks agree on the shared pair") {
  Rng rng(17);
  const RegularGraph g = random_regular(500, 3, rng);
  const SpectralData sd = eigendecompose(g, EigMode::dense);
  int best = 0;
  for (int i = 0; i < g.n; ++i) {
    if (std::abs(sd.eigenvalues(i) - 1.0) < std::abs(sd.eigenvalues(best) - 1.0)) best = i;
  }
  const Eigen::VectorXd v = sd.eigenvectors.col(best);
  const BallIndex star = build_ball(BallKind::star, 3, 1);
  const BallIndex edge = build_ball(BallKind::edge, 3, 0);
  const double scale = std::sqrt(static_cast<double>(g.n));
  std::vector<double> from_star, from_edge;
  for (long long i = 0; i < 80000; ++i) {
    const Eigen::VectorXd xs = lift_pullback(v, sample_lift(g, star, rng), scale);
    from_star.push_back(xs[0] * xs[1]);
    const Eigen::VectorXd xe = lift_pullback(v, sample_lift(g, edge, rng), scale);
    from_edge.push_back(xe[0] * xe[1]);
  }
  const MeanStderr a = mean_stderr(from_star);
  const MeanStderr b = mean_stderr(from_edge);
  CHECK(std::abs(a.mean - b.mean) <= 4.0 * std::hypot(a.stderr_, b.stderr_));
}

TEST_CASE("local statistics recover the scale of a kernel vector") {
  Rng grng(23);
  const RegularGraph g = random_regular(2000, 3, grng);
  const WaveParams p{3, 1.0};
  Rng krng(29);
  const Eigen::VectorXd v = apply_local_kernel(g, linear_factor_coeffs(p, 3), krng);
  const BallIndex ball = build_ball(BallKind::star, 3, 1);
  Rng rng(31);
  const LocalStatsReport rep = local_stats(g, v, 1.0, ball, 20000, rng);
  CHECK(!rep.sigma_degenerate);
  CHECK(std::abs(rep.sigma_hat - 1.0) < 0.05);
  CHECK(rep.ks < 0.05);
  CHECK(rep.lifts == 20000);
  CHECK(rep.emp_cov.rows() == ball.size());
  CHECK(rep.model_cov.rows() == ball.size());
  // the lifted distance-1 moment sits near sigma_hat^2 f(1)
  const double target = rep.sigma_hat * rep.sigma_hat / 3.0;
  CHECK(std::abs(rep.dist1_cov - target) < 6.0 * rep.dist1_stderr + 0.01);
}

TEST_CASE("local statistics flag a localized vector as degenerate") {
  Rng grng(37);
  const RegularGraph g = random_regular(2000, 3, grng);
  const WaveParams p{3, 1.0};
  const Eigen::VectorXd v = localized_vector(g, 5, 4, p);
  const BallIndex ball = build_ball(BallKind::star, 3, 1);
  Rng rng(41);
  const LocalStatsReport rep = local_stats(g, v, 1.0, ball, 5000, rng);
  CHECK(rep.sigma_degenerate);
  CHECK(rep.sigma_hat == 0.0);
  // with sigma = 0 the ks field reports the mass-at-zero fraction instead
  CHECK(rep.ks > 0.97);
}

TEST_CASE("local statistics are deterministic in the seed") {
  Rng grng(43);
  const RegularGraph g = random_regular(400, 3, grng);
  const SpectralData sd = eigendecompose(g, EigMode::dense);
  const Eigen::VectorXd v = sd.eigenvectors.col(200);
  const BallIndex ball = build_ball(BallKind::star, 3, 1);
  Rng r1(47), r2(47);
  const LocalStatsReport a = local_stats(g, v, sd.eigenvalues(200), ball, 4000, r1);
  const LocalStatsReport b = local_stats(g, v, sd.eigenvalues(200), ball, 4000, r2);
  CHECK(a.sigma_hat == b.sigma_hat);
  CHECK(a.ks == b.ks);
  CHECK((a.emp_cov - b.emp_cov).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.dist1_cov == b.dist1_cov);
}

TEST_CASE("local statistics reject eigenvalues outside the tree spectrum") {
  Rng grng(53);
  const RegularGraph g = random_regular(100, 3, grng);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(g.n);
  v[0] = 1.0;
  const BallIndex ball = build_ball(BallKind::star, 3, 1);
  Rng rng(59);
  CHECK_THROWS_AS(local_stats(g, v, 2.9, ball, 100, rng), std::domain_error);
}

TEST_CASE("coloring inequality margin vanishes for a noiseless constant vector") {
  Rng grng(61);
  const RegularGraph g = random_regular(600, 3, grng);
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(g.n, 1.0 / std::sqrt(g.n));
  Rng rng(67);
  const EntropyInequalityReport rep = entropy_inequality_check(g, v, 0.0, 2, 20000, rng);
  // every color is the same grid point, so both sides vanish
  CHECK(rep.star_entropy <= 1e-12);
  CHECK(rep.edge_entropy <= 1e-12);
  CHECK(std::abs(rep.margin) <= 1e-12);
}

TEST_CASE("coloring inequality margin is positive for an iid field") {
  Rng grng(71);
  const RegularGraph g = random_regular(1000, 3, grng);
  Rng vrng(73);
  Eigen::VectorXd v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = vrng.normal();
  v /= v.norm();
  Rng rng(79);
  const EntropyInequalityAggregate agg =
      entropy_inequality_experiment(g, v, 0.5, 2, 200000, 6, rng);
  REQUIRE(agg.checks.size() == 6);
  // vertex-color mutual information keeps the margin strictly positive
  CHECK(agg.margin > 3.0 * agg.margin_stderr);
  CHECK(agg.margin > 0.03);
  // per-coordinate edge marginal matches the exact color mixture
  const double scale = std::sqrt(static_cast<double>(g.n));
  std::vector<double> mix(9, 0.0);
  for (int i = 0; i < g.n; ++i) {
    const std::vector<double> pmf = rounded_normal_pmf(scale * v[i], 0.5, 2);
    for (int j = 0; j < 9; ++j) mix[j] += pmf[j] / g.n;
  }
  double h_mix = 0.0;
  for (double p : mix) {
    if (p > 0.0) h_mix -= p * std::log(p);
  }
  CHECK(std::abs(agg.checks[0].edge_entropy / 2.0 - h_mix) < 0.05);
}

TEST_CASE("lift reports serialize with schemas") {
  Rng grng(83);
  const RegularGraph g = random_regular(400, 3, grng);
  const SpectralData sd = eigendecompose(g, EigMode::dense);
  const Eigen::VectorXd v = sd.eigenvectors.col(100);
  const BallIndex ball = build_ball(BallKind::star, 3, 1);
  Rng rng(89);
  const LocalStatsReport rep = local_stats(g, v, sd.eigenvalues(100), ball, 2000, rng);
  const nlohmann::json j = nlohmann::json::parse(to_json_string(rep, 89));
  CHECK(j.at("schema") == "wavecheck.lift-stats/1");
  CHECK(j.at("lifts") == 2000);
  CHECK(j.at("seed") == 89);

  Rng rng2(97);
  const EntropyInequalityAggregate agg =
      entropy_inequality_experiment(g, v, 0.5, 2, 5000, 2, rng2);
  const nlohmann::json ja = nlohmann::json::parse(to_json_string(agg, 97));
  CHECK(ja.at("schema") == "wavecheck.entropy-inequality/1");
  CHECK(ja.at("checks").size() == 2);
}
