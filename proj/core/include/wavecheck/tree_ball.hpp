#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace wavecheck {

// Finite balls in the infinite d-regular tree, rooted either at the star
// around a vertex (kind star, radius k around the central star: depths
// 0..k+1) or at an edge (kind edge, radius k around the central edge:
// depths 0..k on each side).
enum class BallKind { star, edge };

// Genealogical label: digit path from the nearest root.  For star balls the
// first digit ranges over 1..d and later digits over 1..d-1; for edge balls
// every digit ranges over 1..d-1 and `primed` selects the second root's side.
struct Label {
  std::vector<int> digits;
  bool primed = false;
};

std::string label_string(const Label& lab);

struct BallIndex {
  BallKind kind = BallKind::star;
  int d = 3;
  int k = 0;
  std::vector<Label> labels;           // vertex -> label, BFS by depth,
                                       // plain side first, then lexicographic
  std::vector<int> depth;              // |v| = digit count
  std::vector<char> boundary;          // degree inside the ball < d
  std::vector<int> parent;             // -1 for the roots
  std::vector<std::vector<int>> adj;   // sorted neighbor lists

  int size() const { return static_cast<int>(labels.size()); }
  int max_depth() const { return kind == BallKind::star ? k + 1 : k; }
};

// d >= 3, k >= 0.
BallIndex build_ball(BallKind kind, int d, int k);

// Tree metric from the labels alone.
int tree_distance(const BallIndex& ball, int u, int v);

// Vertex id for a label, or -1.
int find_vertex(const BallIndex& ball, const Label& lab);

std::vector<int> interior_vertices(const BallIndex& ball);

// dim W_lambda: d(d-1)^k for star balls, 2(d-1)^k for edge balls,
// independent of lambda.
long long eigenspace_dim(BallKind kind, int d, int k);

// One row per interior vertex v: -lambda at v, +1 at each neighbor.
Eigen::MatrixXd eigenspace_constraints(const BallIndex& ball, double lambda);

// Orthonormal basis of the eigenvector-equation null space (SVD, singular
// values below 1e-10 times the largest treated as zero).
Eigen::MatrixXd eigenspace_basis(const BallIndex& ball, double lambda);

// Combinatorial basis: unit values on a free set, remaining vertices solved
// from the interior equations outward.  Full column rank, not orthonormal.
Eigen::MatrixXd greedy_eigenbasis(const BallIndex& ball, double lambda);

// Orthogonal projector onto the column span of a full-column-rank matrix.
Eigen::MatrixXd column_space_projector(const Eigen::MatrixXd& m);

}  // namespace wavecheck
