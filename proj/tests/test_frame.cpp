#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "wavecheck/frame.hpp"

using namespace wavecheck;

TEST_CASE("cone angle and weights at reference parameters") {
  const FrameDecomposition f0 = frame_decomposition(3, 0.0);
  CHECK(f0.s == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f0.t1 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const FrameDecomposition f1 = frame_decomposition(3, 1.0);
  CHECK(f1.s == doctest::Approx(std::sqrt(8.0) / 3.0).epsilon(1e-14));
  CHECK(f1.t1 == doctest::Approx(0.3232233047033631).epsilon(1e-12));
  CHECK(f1.t2 == doctest::Approx(1.0 - f1.t1).epsilon(1e-14));

  const FrameDecomposition fe = frame_decomposition(3, 2.0 * std::sqrt(2.0));
  CHECK(fe.t1 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("weights stay in the unit interval across the spectrum") {
  for (int d : {3, 4, 5, 6}) {
    const double r = 2.0 * std::sqrt(d - 1.0);
    for (int i = 0; i <= 8; ++i) {
      const double lambda = -r + 2.0 * r * i / 8.0;
      const FrameDecomposition f = frame_decomposition(d, lambda);
      CHECK(f.t1 >= -1e-12);
      CHECK(f.t1 <= 1.0 + 1e-12);
      CHECK(f.t1 + f.t2 == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("frame vectors reproduce the defining geometry") {
  const FrameDecomposition f = frame_decomposition(4, 1.3);
  const int d = f.d;
  CHECK(f.w.size() == d);
  CHECK(std::abs(f.w.norm() - 1.0) < 1e-13);
  for (int i = 0; i < d; ++i) {
    CHECK(std::abs(f.v.col(i).norm() - 1.0) < 1e-12);
    // inner product with the axis is lambda/d for every cone vector
    CHECK(f.v.col(i).dot(f.w) == doctest::Approx(f.lambda / d).epsilon(1e-12));
    CHECK(f.a.col(i).dot(f.w) * f.a.col(i).dot(f.w) ==
          doctest::Approx((1.0 + f.s) / 2.0).epsilon(1e-11));
    CHECK(f.b.col(i).dot(f.w) * f.b.col(i).dot(f.w) ==
          doctest::Approx((1.0 - f.s) / 2.0).epsilon(1e-11));
  }
  // cone vectors sum to lambda w: the eigenvector identity of the star
  CHECK((f.v.rowwise().sum() - f.lambda * f.w).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("frame identities hold across dimensions and eigenvalues") {
  for (int d : {3, 4, 5, 6}) {
    const double r = 2.0 * std::sqrt(d - 1.0);
    for (int i = 0; i <= 8; ++i) {
      const double lambda = -r + 2.0 * r * i / 8.0;
      const FrameDecomposition f = frame_decomposition(d, lambda);
      CHECK(frame_sum_defect(f) < 1e-10);
      CHECK(umbrella_defect(f) < 1e-10);
      CHECK(reconstruction_defect(f) < 1e-10);
    }
  }
}

TEST_CASE("gram matrix carries the axis and simplex inner products") {
  const FrameDecomposition f = frame_decomposition(3, 1.0);
  const Eigen::MatrixXd gram = frame_gram(f);  // [w, v_1..v_d]
  REQUIRE(gram.rows() == f.d + 1);
  const double c = f.lambda / f.d;
  const double off = c * c - f.s * f.s / (f.d - 1.0);
  for (int i = 0; i <= f.d; ++i) {
    CHECK(gram(i, i) == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < i; ++j) {
      const double expect = j == 0 ? c : off;
      CHECK(gram(i, j) == doctest::Approx(expect).epsilon(1e-11));
    }
  }
}

TEST_CASE("parameters outside the tree spectrum are rejected") {
  CHECK_THROWS_AS(frame_decomposition(3, 2.0 * std::sqrt(2.0) + 1e-6), std::domain_error);
  CHECK_THROWS_AS(frame_decomposition(4, -3.5), std::domain_error);
  CHECK_NOTHROW(frame_decomposition(4, 2.0 * std::sqrt(3.0)));
}
