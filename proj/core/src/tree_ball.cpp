#include "wavecheck/tree_ball.hpp"

#include <algorithm>
#include <stdexcept>

namespace wavecheck {

std::string label_string(const Label& lab) {
  std::string s;
  if (lab.digits.empty()) {
    s = "o";
  } else {
    for (int d : lab.digits) s += std::to_string(d);
  }
  if (lab.primed) s += '\'';
  return s;
}

BallIndex build_ball(BallKind kind, int d, int k) {
  if (d < 3) throw std::invalid_argument("build_ball: d must be >= 3");
  if (k < 0) throw std::invalid_argument("build_ball: k must be >= 0");

  BallIndex ball;
  ball.kind = kind;
  ball.d = d;
  ball.k = k;

  const int max_depth = kind == BallKind::star ? k + 1 : k;

  // Roots.
  ball.labels.push_back(Label{});
  ball.parent.push_back(-1);
  if (kind == BallKind::edge) {
    ball.labels.push_back(Label{{}, true});
    ball.parent.push_back(-1);
  }

  // Children by depth; parents are already in BFS-lexicographic order, so
  // appending children in parent order keeps that order at every depth.
  std::vector<int> frontier;
  for (int v = 0; v < static_cast<int>(ball.labels.size()); ++v) frontier.push_back(v);
  for (int depth = 1; depth <= max_depth; ++depth) {
    std::vector<int> next;
    for (int p : frontier) {
      const Label pl = ball.labels[p];  // copy: push_back below reallocates
      const int nchildren =
          (kind == BallKind::star && pl.digits.empty()) ? d : d - 1;
      for (int c = 1; c <= nchildren; ++c) {
        Label child = pl;
        child.digits.push_back(c);
        ball.labels.push_back(child);
        ball.parent.push_back(p);
        next.push_back(static_cast<int>(ball.labels.size()) - 1);
      }
    }
    frontier = std::move(next);
  }

  const int n = ball.size();
  ball.depth.resize(n);
  ball.adj.assign(n, {});
  for (int v = 0; v < n; ++v) {
    ball.depth[v] = static_cast<int>(ball.labels[v].digits.size());
    if (ball.parent[v] >= 0) {
      ball.adj[v].push_back(ball.parent[v]);
      ball.adj[ball.parent[v]].push_back(v);
    }
  }
  if (kind == BallKind::edge) {
    ball.adj[0].push_back(1);
    ball.adj[1].push_back(0);
  }
  for (auto& nb : ball.adj) std::sort(nb.begin(), nb.end());

  ball.boundary.resize(n);
  for (int v = 0; v < n; ++v)
    ball.boundary[v] = static_cast<int>(ball.adj[v].size()) < d ? 1 : 0;
  return ball;
}

int tree_distance(const BallIndex& ball, int u, int v) {
  const Label& a = ball.labels[u];
  const Label& b = ball.labels[v];
  const int la = static_cast<int>(a.digits.size());
  const int lb = static_cast<int>(b.digits.size());
  if (a.primed != b.primed) return la + lb + 1;
  int c = 0;
  while (c < la && c < lb && a.digits[c] == b.digits[c]) ++c;
  return (la - c) + (lb - c);
}

int find_vertex(const BallIndex& ball, const Label& lab) {
  for (int v = 0; v < ball.size(); ++v) {
    if (ball.labels[v].primed == lab.primed && ball.labels[v].digits == lab.digits)
      return v;
  }
  return -1;
}

std::vector<int> interior_vertices(const BallIndex& ball) {
  std::vector<int> out;
  for (int v = 0; v < ball.size(); ++v)
    if (!ball.boundary[v]) out.push_back(v);
  return out;
}

long long eigenspace_dim(BallKind kind, int d, int k) {
  long long p = 1;
  for (int j = 0; j < k; ++j) p *= d - 1;
  return kind == BallKind::star ? static_cast<long long>(d) * p : 2 * p;
}

Eigen::MatrixXd eigenspace_constraints(const BallIndex& ball, double lambda) {
  const std::vector<int> interior = interior_vertices(ball);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<int>(interior.size()), ball.size());
  for (int r = 0; r < static_cast<int>(interior.size()); ++r) {
    const int v = interior[r];
    c(r, v) = -lambda;
    for (int w : ball.adj[v]) c(r, w) += 1.0;
  }
  return c;
}

Eigen::MatrixXd eigenspace_basis(const BallIndex& ball, double lambda) {
  const Eigen::MatrixXd c = eigenspace_constraints(ball, lambda);
  const int n = ball.size();
  if (c.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

Eigen::MatrixXd greedy_eigenbasis(const BallIndex& ball, double lambda) {
  const int n = ball.size();
  const int d = ball.d;

  // Free vertices: the roots, all but the last child of each root's star,
  // and all but the last child of every deeper interior vertex.  The last
  // child is solved from the interior equation at its parent.
  std::vector<char> free_vertex(n, 0);
  free_vertex[0] = 1;
  if (ball.kind == BallKind::edge) free_vertex[1] = 1;
  std::vector<int> children_of(n, 0);
  std::vector<std::vector<int>> children(n);
  for (int v = 0; v < n; ++v)
    if (ball.parent[v] >= 0) children[ball.parent[v]].push_back(v);

  for (int v = 0; v < n; ++v) {
    if (ball.boundary[v]) {
      for (int c : children[v]) free_vertex[c] = 1;  // no equation at v
      continue;
    }
    // children[] is in label order; the last one is determined.
    for (std::size_t i = 0; i + 1 < children[v].size(); ++i)
      free_vertex[children[v][i]] = 1;
  }

  std::vector<int> frees;
  for (int v = 0; v < n; ++v)
    if (free_vertex[v]) frees.push_back(v);

  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, static_cast<int>(frees.size()));
  const std::vector<int> interior = interior_vertices(ball);
  for (int col = 0; col < static_cast<int>(frees.size()); ++col) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    f(frees[col]) = 1.0;
    // Interior vertices in BFS order: everything in the equation at v other
    // than v's last child is already final when v is processed.
    for (int v : interior) {
      if (children[v].empty()) continue;
      const int solved = children[v].back();
      double s = lambda * f(v);
      for (int w : ball.adj[v])
        if (w != solved) s -= f(w);
      f(solved) = s;
    }
    basis.col(col) = f;
  }
  return basis;
}

Eigen::MatrixXd column_space_projector(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  return q * q.transpose();
}

}  // namespace wavecheck
