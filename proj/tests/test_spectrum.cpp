#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "wavecheck/dense_eig.hpp"
#include "wavecheck/spectrum.hpp"
#include "wavecheck/tree_ball.hpp"
#include "wavecheck/wave.hpp"

using namespace wavecheck;

TEST_CASE("invariant subspaces tile the whole ball") {
  for (int d : {3, 4}) {
    for (int k = 0; k <= 3; ++k) {
      for (BallKind kind : {BallKind::star, BallKind::edge}) {
        const BallIndex ball = build_ball(kind, d, k);
        const WaveParams p{d, 0.9};
        const DecompositionReport rep = verify_decomposition(ball, p);
        CHECK(rep.dims_complete);
        CHECK(rep.dim_total == ball.size());
        CHECK(rep.max_invariance_defect < 1e-8);
        CHECK(rep.max_gram_defect < 1e-10);
      }
    }
  }
}

TEST_CASE("subspace dimensions follow the depth and sector counts") {
  const BallIndex star = build_ball(BallKind::star, 3, 2);
  // depth-constant functions: one value per depth 0..k+1
  CHECK(subspace_dim(star, SubspaceKind::depth_constant) == star.max_depth() + 1);
  const BallIndex edge = build_ball(BallKind::edge, 3, 2);
  CHECK(subspace_dim(edge, SubspaceKind::depth_symmetric) == edge.max_depth() + 1);
  CHECK(subspace_dim(edge, SubspaceKind::depth_antisymmetric) == edge.max_depth() + 1);
}

namespace {

// Nonzero eigenvalues of the covariance compressed onto an invariant
// subspace; `mult` of them should equal the closed form, the rest vanish.
Eigen::VectorXd restricted_eigs(const Eigen::MatrixXd& cov, const Eigen::MatrixXd& q) {
  const Eigen::MatrixXd small = q.transpose() * cov * q;
  return sym_eigenvalues(small);  // ascending
}

}  // namespace

TEST_CASE("closed-form eigenvalues match the restricted covariance") {
  const int d = 3;
  for (double lambda : {0.0, 1.0, -1.0, 2.4}) {
    const WaveParams p{d, lambda};
    for (int k = 1; k <= 5; ++k) {
      const BallIndex star = build_ball(BallKind::star, d, k - 1);
      const Eigen::MatrixXd cov = covariance_matrix(star, p);

      const Eigen::VectorXd ge = restricted_eigs(cov, subspace_basis(star, SubspaceKind::depth_constant).basis);
      const double s1 = eigenvalue_s(1, k, p);
      CHECK(std::abs(ge(ge.size() - 1) - s1) < 1e-8 * std::max(1.0, std::abs(s1)));
      if (ge.size() > 1) CHECK(std::abs(ge(ge.size() - 2)) < 1e-8 * std::max(1.0, s1));

      const Eigen::VectorXd se = restricted_eigs(cov, subspace_basis(star, SubspaceKind::sector, 0).basis);
      const double s2 = eigenvalue_s(2, k, p);
      for (int i = 0; i < d - 1; ++i) {
        CHECK(std::abs(se(se.size() - 1 - i) - s2) < 1e-8 * std::max(1.0, std::abs(s2)));
      }

      const BallIndex edge = build_ball(BallKind::edge, d, k - 1);
      const Eigen::MatrixXd ecov = covariance_matrix(edge, p);
      const Eigen::VectorXd sy = restricted_eigs(ecov, subspace_basis(edge, SubspaceKind::depth_symmetric).basis);
      const Eigen::VectorXd an = restricted_eigs(ecov, subspace_basis(edge, SubspaceKind::depth_antisymmetric).basis);
      const double s3 = eigenvalue_s(3, k, p);
      const double s4 = eigenvalue_s(4, k, p);
      const double top_sy = std::abs(sy(sy.size() - 1)) > std::abs(sy(0)) ? sy(sy.size() - 1) : sy(0);
      const double top_an = std::abs(an(an.size() - 1)) > std::abs(an(0)) ? an(an.size() - 1) : an(0);
      CHECK(std::abs(top_sy - s3) < 1e-8 * std::max(1.0, std::abs(s3)));
      CHECK(std::abs(top_an - s4) < 1e-8 * std::max(1.0, std::abs(s4)));
    }
  }
}

TEST_CASE("pseudo log-determinants agree between eigenvalue and cholesky routes") {
  // full-rank diagonal case with a known value
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag(0, 0) = 2.0;
  diag(1, 1) = 3.0;
  CHECK(logdet_sp(diag, 2) == doctest::Approx(std::log(6.0)).epsilon(1e-13));
  CHECK(logdet_sp_chol(diag, 2) == doctest::Approx(std::log(6.0)).epsilon(1e-13));

  // rank-deficient wave covariance
  const BallIndex ball = build_ball(BallKind::star, 3, 2);
  const WaveParams p{3, 1.0};
  const Eigen::MatrixXd cov = covariance_matrix(ball, p);
  const long long rank = eigenspace_dim(BallKind::star, 3, 2);
  const double a = logdet_sp(cov, rank);
  const double b = logdet_sp_chol(cov, rank);
  CHECK(std::abs(a - b) < 1e-8 * std::max(1.0, std::abs(a)));
  CHECK_THROWS_AS(logdet_sp(cov, rank + 3), std::runtime_error);
}

TEST_CASE("log-det functional agrees between closed form and brute force") {
  for (double lambda : {0.0, 1.0, 2.5}) {
    const WaveParams p{3, lambda};
    for (int k : {2, 4, 6}) {
      const SpectrumReport rep = delta_k(p, k, true);
      REQUIRE(rep.delta_brute.has_value());
      CHECK(std::abs(rep.delta_closed - *rep.delta_brute) < 1e-8);
    }
  }
}

TEST_CASE("log-det functional report serializes with a schema") {
  const SpectrumReport rep = delta_k(WaveParams{3, 1.0}, 3, false);
  const nlohmann::json j = nlohmann::json::parse(to_json_string(rep));
  CHECK(j.at("schema") == "wavecheck.spectrum/1");
  CHECK(j.at("k") == 3);
  CHECK(j.at("delta_closed").get<double>() == doctest::Approx(rep.delta_closed));
  CHECK(!j.contains("delta_brute"));
}

TEST_CASE("functional rejects parameters outside the tree spectrum") {
  CHECK_THROWS_AS(delta_k(WaveParams{3, 2.9}, 3, false), std::domain_error);
  CHECK_THROWS_AS(eigenvalue_s(1, 0, WaveParams{3, 1.0}), std::invalid_argument);
}

TEST_CASE("central edge carries no partial covariance at radius two") {
  for (double lambda : {0.0, 1.0, 2.0}) {
    CHECK(conditional_independence_check(WaveParams{3, lambda}, 2) < 1e-8);
  }
}

TEST_CASE("difference coordinates decorrelate and span the constraint space") {
  const BallIndex ball = build_ball(BallKind::star, 3, 1);
  const WaveParams p{3, 1.0};
  const QCoordinateSystem sys = q_coordinates(ball, 0, p);
  CHECK(sys.spans);
  CHECK(sys.expected_dim == eigenspace_dim(BallKind::star, 3, 1));
  CHECK(sys.max_cross_covariance < 1e-8);
  CHECK(sys.min_kept_eigenvalue > 0.0);
}
