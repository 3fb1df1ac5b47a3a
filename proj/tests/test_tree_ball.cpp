#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <set>
#include <string>
#include <vector>

#include "wavecheck/rng.hpp"
#include "wavecheck/tree_ball.hpp"

using namespace wavecheck;

namespace {

long long star_ball_size(int d, int k) {
  // depths 0..k+1
  long long size = 1, shell = d;
  for (int j = 1; j <= k + 1; ++j) {
    size += shell;
    shell *= d - 1;
  }
  return size;
}

long long edge_ball_size(int d, int k) {
  // depths 0..k on each side
  long long size = 0, shell = 1;
  for (int j = 0; j <= k; ++j) {
    size += 2 * shell;
    shell *= d - 1;
  }
  return size;
}

}  // namespace

TEST_CASE("ball sizes match the shell sums") {
  for (int d : {3, 4, 5}) {
    for (int k = 0; k <= 4; ++k) {
      CHECK(build_ball(BallKind::star, d, k).size() == star_ball_size(d, k));
      CHECK(build_ball(BallKind::edge, d, k).size() == edge_ball_size(d, k));
    }
  }
}

TEST_CASE("vertices come in bfs order with consistent parents") {
  for (BallKind kind : {BallKind::star, BallKind::edge}) {
    const BallIndex ball = build_ball(kind, 3, 3);
    const int roots = kind == BallKind::star ? 1 : 2;
    for (int v = 0; v < roots; ++v) {
      CHECK(ball.parent[v] == -1);
      CHECK(ball.depth[v] == 0);
    }
    for (int v = roots; v < ball.size(); ++v) {
      CHECK(ball.parent[v] >= 0);
      CHECK(ball.parent[v] < v);
      CHECK(ball.depth[v] == ball.depth[ball.parent[v]] + 1);
      CHECK(ball.depth[v] >= ball.depth[v - 1]);
    }
  }
}

TEST_CASE("edge ball keeps plain-side vertices before primed at each depth") {
  const BallIndex ball = build_ball(BallKind::edge, 4, 2);
  for (int v = 1; v < ball.size(); ++v) {
    if (ball.depth[v] != ball.depth[v - 1]) continue;
    CHECK(ball.labels[v - 1].primed <= ball.labels[v].primed);
  }
}

TEST_CASE("adjacency is symmetric sorted and regular in the interior") {
  for (BallKind kind : {BallKind::star, BallKind::edge}) {
    const BallIndex ball = build_ball(kind, 4, 2);
    const int n = ball.size();
    for (int v = 0; v < n; ++v) {
      const auto& nb = ball.adj[v];
      CHECK(std::is_sorted(nb.begin(), nb.end()));
      for (int w : nb) {
        const auto& back = ball.adj[w];
        CHECK(std::find(back.begin(), back.end(), v) != back.end());
      }
      const bool full = static_cast<int>(nb.size()) == ball.d;
      CHECK(full == !ball.boundary[v]);
      if (ball.depth[v] == ball.max_depth()) CHECK(ball.boundary[v]);
    }
  }
}

TEST_CASE("edge ball roots are adjacent") {
  for (int k = 0; k <= 3; ++k) {
    const BallIndex ball = build_ball(BallKind::edge, 3, k);
    const auto& nb = ball.adj[0];
    CHECK(std::find(nb.begin(), nb.end(), 1) != nb.end());
    CHECK(tree_distance(ball, 0, 1) == 1);
  }
}

TEST_CASE("tree distance agrees with depth and symmetry") {
  const BallIndex ball = build_ball(BallKind::star, 3, 2);
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int u = static_cast<int>(rng.below(ball.size()));
    const int v = static_cast<int>(rng.below(ball.size()));
    const int duv = tree_distance(ball, u, v);
    CHECK(duv == tree_distance(ball, v, u));
    CHECK(duv >= 0);
    CHECK(tree_distance(ball, 0, v) == ball.depth[v]);
    if (u == v) CHECK(duv == 0);
  }
}

TEST_CASE("labels are unique and round-trip through find_vertex") {
  const BallIndex ball = build_ball(BallKind::edge, 3, 2);
  std::set<std::string> seen;
  for (int v = 0; v < ball.size(); ++v) {
    seen.insert(label_string(ball.labels[v]));
    CHECK(find_vertex(ball, ball.labels[v]) == v);
  }
  CHECK(static_cast<int>(seen.size()) == ball.size());
}

TEST_CASE("interior vertices are exactly the non-boundary ones") {
  const BallIndex ball = build_ball(BallKind::star, 4, 1);
  const std::vector<int> interior = interior_vertices(ball);
  long long expect = 0;
  for (int v = 0; v < ball.size(); ++v) expect += ball.boundary[v] ? 0 : 1;
  CHECK(static_cast<long long>(interior.size()) == expect);
  for (int v : interior) CHECK(!ball.boundary[v]);
}

TEST_CASE("eigenspace dimension equals the boundary count") {
  for (int d : {3, 4}) {
    for (int k = 0; k <= 3; ++k) {
      const BallIndex star = build_ball(BallKind::star, d, k);
      const BallIndex edge = build_ball(BallKind::edge, d, k);
      long long star_boundary = 0, edge_boundary = 0;
      for (int v = 0; v < star.size(); ++v) star_boundary += star.boundary[v] ? 1 : 0;
      for (int v = 0; v < edge.size(); ++v) edge_boundary += edge.boundary[v] ? 1 : 0;
      CHECK(eigenspace_dim(BallKind::star, d, k) == star_boundary);
      CHECK(eigenspace_dim(BallKind::edge, d, k) == edge_boundary);
    }
  }
}

TEST_CASE("eigenspace basis solves the interior equation orthonormally") {
  const BallIndex ball = build_ball(BallKind::star, 3, 2);
  const double lambda = 1.3;
  const Eigen::MatrixXd basis = eigenspace_basis(ball, lambda);
  CHECK(basis.cols() == eigenspace_dim(BallKind::star, 3, 2));
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <
        1e-10);
  const Eigen::MatrixXd cons = eigenspace_constraints(ball, lambda);
  CHECK((cons * basis).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("greedy basis spans the same space as the svd basis") {
  const BallIndex ball = build_ball(BallKind::edge, 3, 2);
  const double lambda = -0.7;
  const Eigen::MatrixXd a = eigenspace_basis(ball, lambda);
  const Eigen::MatrixXd b = greedy_eigenbasis(ball, lambda);
  CHECK(a.cols() == b.cols());
  const Eigen::MatrixXd pa = column_space_projector(a);
  const Eigen::MatrixXd pb = column_space_projector(b);
  CHECK((pa - pb).cwiseAbs().maxCoeff() < 1e-8);
}
