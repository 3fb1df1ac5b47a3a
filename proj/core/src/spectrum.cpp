#include "wavecheck/spectrum.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "wavecheck/dense_eig.hpp"

#ifdef WAVECHECK_HAVE_LAPACKE
#include <lapacke.h>
#endif

namespace wavecheck {

namespace {

int children_count(const BallIndex& ball, int v) {
  if (ball.kind == BallKind::star && v == 0) return ball.d;
  return static_cast<int>(ball.adj[v].size()) - 1;
}

// Digit path class of u relative to anchor v: (child branch, relative
// depth), or branch -1 when u is not a strict descendant of v.
std::pair<int, int> descendant_class(const BallIndex& ball, int anchor, int u) {
  const Label& a = ball.labels[anchor];
  const Label& b = ball.labels[u];
  if (a.primed != b.primed) return {-1, 0};
  if (b.digits.size() <= a.digits.size()) return {-1, 0};
  for (std::size_t i = 0; i < a.digits.size(); ++i)
    if (a.digits[i] != b.digits[i]) return {-1, 0};
  const int branch = b.digits[a.digits.size()] - 1;
  const int rel = static_cast<int>(b.digits.size() - a.digits.size());
  return {branch, rel};
}

}  // namespace

long long subspace_dim(const BallIndex& ball, SubspaceKind kind, int anchor) {
  const int d = ball.d;
  const int k = ball.k;
  switch (kind) {
    case SubspaceKind::depth_constant:
      return ball.kind == BallKind::star ? k + 2 : 0;
    case SubspaceKind::depth_symmetric:
    case SubspaceKind::depth_antisymmetric:
      return ball.kind == BallKind::edge ? k + 1 : 0;
    case SubspaceKind::sector: {
      if (anchor < 0 || anchor >= ball.size() || ball.boundary[anchor]) return 0;
      const int rel_depths = ball.max_depth() - ball.depth[anchor];
      const int classes = children_count(ball, anchor);
      return std::max(0, rel_depths) * std::max(0, classes - 1);
    }
  }
  return 0;
}

SubspaceBasis subspace_basis(const BallIndex& ball, SubspaceKind kind, int anchor) {
  SubspaceBasis out;
  out.kind = kind;
  out.anchor = kind == SubspaceKind::sector ? anchor : -1;
  const int n = ball.size();
  const long long dim = subspace_dim(ball, kind, anchor);
  out.basis = Eigen::MatrixXd::Zero(n, dim);

  switch (kind) {
    case SubspaceKind::depth_constant:
    case SubspaceKind::depth_symmetric: {
      out.name = kind == SubspaceKind::depth_constant ? "G" : "G1'";
      // Normalized indicator of each depth (both sides for edge balls).
      std::vector<int> count(ball.max_depth() + 1, 0);
      for (int v = 0; v < n; ++v) ++count[ball.depth[v]];
      for (int v = 0; v < n; ++v)
        out.basis(v, ball.depth[v]) = 1.0 / std::sqrt(static_cast<double>(count[ball.depth[v]]));
      break;
    }
    case SubspaceKind::depth_antisymmetric: {
      out.name = "G2'";
      std::vector<int> count(ball.max_depth() + 1, 0);
      for (int v = 0; v < n; ++v) ++count[ball.depth[v]];
      for (int v = 0; v < n; ++v) {
        const double sign = ball.labels[v].primed ? -1.0 : 1.0;
        out.basis(v, ball.depth[v]) =
            sign / std::sqrt(static_cast<double>(count[ball.depth[v]]));
      }
      break;
    }
    case SubspaceKind::sector: {
      out.name = "E_" + label_string(ball.labels[anchor]);
      if (dim == 0) break;
      const int classes = children_count(ball, anchor);
      const int rel_depths = ball.max_depth() - ball.depth[anchor];
      // Helmert vectors h_i in R^classes: orthonormal, each summing to zero.
      Eigen::MatrixXd helmert = Eigen::MatrixXd::Zero(classes, classes - 1);
      for (int i = 1; i < classes; ++i) {
        for (int j = 0; j < i; ++j) helmert(j, i - 1) = 1.0;
        helmert(i, i - 1) = -static_cast<double>(i);
        helmert.col(i - 1) /= std::sqrt(static_cast<double>(i) * (i + 1));
      }
      // Class sizes (d-1)^{rel-1} are equal across branches at each depth.
      std::vector<double> class_size(rel_depths + 1, 1.0);
      for (int r = 2; r <= rel_depths; ++r)
        class_size[r] = class_size[r - 1] * (ball.d - 1);
      for (int u = 0; u < n; ++u) {
        const auto [branch, rel] = descendant_class(ball, anchor, u);
        if (branch < 0 || rel > rel_depths) continue;
        for (int i = 0; i < classes - 1; ++i)
          out.basis(u, (rel - 1) * (classes - 1) + i) =
              helmert(branch, i) / std::sqrt(class_size[rel]);
      }
      break;
    }
  }
  return out;
}

std::vector<SubspaceBasis> all_subspaces(const BallIndex& ball) {
  std::vector<SubspaceBasis> out;
  if (ball.kind == BallKind::star) {
    out.push_back(subspace_basis(ball, SubspaceKind::depth_constant));
  } else {
    out.push_back(subspace_basis(ball, SubspaceKind::depth_symmetric));
    out.push_back(subspace_basis(ball, SubspaceKind::depth_antisymmetric));
  }
  for (int v = 0; v < ball.size(); ++v) {
    if (subspace_dim(ball, SubspaceKind::sector, v) > 0)
      out.push_back(subspace_basis(ball, SubspaceKind::sector, v));
  }
  return out;
}

DecompositionReport verify_decomposition(const BallIndex& ball, const WaveParams& p) {
  const Eigen::MatrixXd sigma = covariance_matrix(ball, p);
  const int n = ball.size();
  const std::vector<SubspaceBasis> subs = all_subspaces(ball);

  DecompositionReport rep;
  for (const auto& s : subs) rep.dim_total += s.basis.cols();
  rep.dims_complete = rep.dim_total == n;

  const double sigma_norm = sym_eigenvalues(sigma).cwiseAbs().maxCoeff();

  Eigen::MatrixXd stacked(n, rep.dim_total);
  int col = 0;
  for (const auto& s : subs) {
    stacked.middleCols(col, s.basis.cols()) = s.basis;
    col += static_cast<int>(s.basis.cols());

    // Invariance: Sigma maps the subspace into itself.
    const Eigen::MatrixXd sq = sigma * s.basis;
    const Eigen::MatrixXd defect = sq - s.basis * (s.basis.transpose() * sq);
    const Eigen::MatrixXd gram = defect.transpose() * defect;
    const double op = std::sqrt(std::max(0.0, sym_eigenvalues(gram).maxCoeff()));
    rep.max_invariance_defect = std::max(rep.max_invariance_defect, op / sigma_norm);
  }

  const Eigen::MatrixXd gram = stacked.transpose() * stacked;
  rep.max_gram_defect =
      (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  return rep;
}

namespace {

// l(j) = expected wave product sum over the depth-j sphere seen from one of
// its own vertices, common-ancestor terms only.
std::vector<double> l_values(int kmax, const WaveParams& p) {
  const double d = p.d;
  std::vector<double> l(kmax + 1, 0.0);
  double acc = 1.0;  // l(1)
  double pw = 1.0;   // (d-1)^{m-1}
  for (int j = 1; j <= kmax; ++j) {
    l[j] = acc;
    acc += (d - 2.0) * pw * spherical_f(2 * j, p);
    pw *= d - 1.0;
  }
  return l;
}

}  // namespace

double eigenvalue_s(int i, int k, const WaveParams& p) {
  if (k < 1) throw std::invalid_argument("eigenvalue_s: k must be >= 1");
  const double d = p.d;
  const std::vector<double> l = l_values(k, p);

  switch (i) {
    case 1: {
      double s = 1.0;
      double pw = d - 1.0;
      for (int j = 1; j <= k; ++j) {
        s += pw * spherical_f(2 * j, p) + l[j];
        pw *= d - 1.0;
      }
      return s;
    }
    case 2: {
      double lsum = 0.0;
      for (int j = 1; j <= k; ++j) lsum += l[j];
      return (1.0 - eigenvalue_s(1, k, p) + d * lsum) / (d - 1.0);
    }
    case 3:
    case 4: {
      const double sign = i == 3 ? 1.0 : -1.0;
      double s = 0.0;
      double pw = 1.0;
      for (int j = 1; j <= k; ++j) {
        s += l[j] + sign * pw * spherical_f(2 * j - 1, p);
        pw *= d - 1.0;
      }
      return s;
    }
    default:
      throw std::invalid_argument("eigenvalue_s: i must be 1..4");
  }
}

double logdet_sp(const Eigen::MatrixXd& m, long long expected_rank) {
  const Eigen::VectorXd ev = sym_eigenvalues(m);
  const double cut = 1e-8 * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  long long kept = 0;
  double logdet = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > cut) {
      ++kept;
      logdet += std::log(ev(i));
    }
  }
  if (kept != expected_rank)
    throw std::runtime_error("logdet_sp: retained " + std::to_string(kept) +
                             " eigenvalues, expected " + std::to_string(expected_rank));
  return logdet;
}

double logdet_sp_chol(Eigen::MatrixXd m, long long expected_rank) {
#ifdef WAVECHECK_HAVE_LAPACKE
  const lapack_int n = static_cast<lapack_int>(m.rows());
  std::vector<lapack_int> piv(n);
  lapack_int rank = 0;
  const double tol = 1e-9 * m.diagonal().maxCoeff();
  const lapack_int info =
      LAPACKE_dpstrf(LAPACK_COL_MAJOR, 'L', n, m.data(), n, piv.data(), &rank, tol);
  if (info < 0) throw std::runtime_error("logdet_sp_chol: dpstrf failed");
  if (rank != expected_rank)
    throw std::runtime_error("logdet_sp_chol: rank " + std::to_string(rank) +
                             ", expected " + std::to_string(expected_rank));
  // P^T A P = L L^T with L n-by-rank lower trapezoidal; the nonzero
  // eigenvalues of A are those of L^T L, so det_sp(A) = det(L^T L).
  m.topRows(rank)
      .leftCols(rank)
      .triangularView<Eigen::StrictlyUpper>()
      .setZero();
  const auto l = m.leftCols(rank);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(rank, rank);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(l.transpose());
  const Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("logdet_sp_chol: retained block not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < rank; ++i) logdet += 2.0 * std::log(gram(i, i));
  return logdet;
#else
  return logdet_sp(m, expected_rank);
#endif
}

SpectrumReport delta_k(const WaveParams& p, int k, bool with_brute_force) {
  if (k < 1) throw std::invalid_argument("delta_k: k must be >= 1");
  if (std::abs(p.lambda) > 2.0 * std::sqrt(p.d - 1.0) * (1.0 + 1e-12))
    throw std::domain_error("delta_k: lambda outside the tree spectrum");
  SpectrumReport rep;
  rep.d = p.d;
  rep.lambda = p.lambda;
  rep.k = k;
  rep.s1 = eigenvalue_s(1, k, p);
  rep.s2 = eigenvalue_s(2, k, p);
  rep.s3 = eigenvalue_s(3, k, p);
  rep.s4 = eigenvalue_s(4, k, p);
  if (!(rep.s1 > 0.0) || !(rep.s2 > 0.0) || !(rep.s3 > 0.0) || !(rep.s4 > 0.0))
    throw std::runtime_error("delta_k: nonpositive closed-form eigenvalue");
  const double d = p.d;
  rep.delta_closed = std::log(rep.s1) + (d - 1.0) * std::log(rep.s2) -
                     d / 2.0 * (std::log(rep.s3) + std::log(rep.s4));
  if (with_brute_force) {
    const BallIndex star = build_ball(BallKind::star, p.d, k - 1);
    const BallIndex edge = build_ball(BallKind::edge, p.d, k - 1);
    const double lds = logdet_sp(covariance_matrix(star, p),
                                 eigenspace_dim(BallKind::star, p.d, k - 1));
    const double lde = logdet_sp(covariance_matrix(edge, p),
                                 eigenspace_dim(BallKind::edge, p.d, k - 1));
    rep.delta_brute = lds - d / 2.0 * lde;
  }
  return rep;
}

std::string to_json_string(const SpectrumReport& r) {
  nlohmann::json j;
  j["schema"] = "wavecheck.spectrum/1";
  j["d"] = r.d;
  j["lambda"] = r.lambda;
  j["k"] = r.k;
  j["s1"] = r.s1;
  j["s2"] = r.s2;
  j["s3"] = r.s3;
  j["s4"] = r.s4;
  j["delta_closed"] = r.delta_closed;
  if (r.delta_brute) j["delta_brute"] = *r.delta_brute;
  return j.dump();
}

double partial_covariance_across_edge(const BallIndex& ball, const Eigen::MatrixXd& cov) {
  // Central edge: the root and its first child (star balls) or the two
  // roots (edge balls); both are vertices 0 and 1 in BFS order.
  const int e0 = 0, e1 = 1;
  std::vector<int> side_a, side_b;
  for (int v = 2; v < ball.size(); ++v) {
    // Side A: subtree hanging off e1, away from e0.
    const int dist_e1 = tree_distance(ball, v, e1);
    const int dist_e0 = tree_distance(ball, v, e0);
    (dist_e1 < dist_e0 ? side_a : side_b).push_back(v);
  }
  if (side_a.empty() || side_b.empty()) return 0.0;

  Eigen::Matrix2d see;
  see << cov(e0, e0), cov(e0, e1), cov(e1, e0), cov(e1, e1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(see);
  const double cut = 1e-10 * es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::Matrix2d pinv = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 2; ++i) {
    if (std::abs(es.eigenvalues()(i)) > cut)
      pinv += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() /
              es.eigenvalues()(i);
  }

  Eigen::MatrixXd sae(side_a.size(), 2), sbe(side_b.size(), 2);
  Eigen::MatrixXd sab(side_a.size(), side_b.size());
  for (std::size_t i = 0; i < side_a.size(); ++i) {
    sae(static_cast<int>(i), 0) = cov(side_a[i], e0);
    sae(static_cast<int>(i), 1) = cov(side_a[i], e1);
    for (std::size_t j = 0; j < side_b.size(); ++j)
      sab(static_cast<int>(i), static_cast<int>(j)) = cov(side_a[i], side_b[j]);
  }
  for (std::size_t j = 0; j < side_b.size(); ++j) {
    sbe(static_cast<int>(j), 0) = cov(side_b[j], e0);
    sbe(static_cast<int>(j), 1) = cov(side_b[j], e1);
  }
  const Eigen::MatrixXd partial = sab - sae * pinv * sbe.transpose();
  return partial.cwiseAbs().maxCoeff();
}

double conditional_independence_check(const WaveParams& p, int k) {
  const BallIndex ball = build_ball(BallKind::star, p.d, k);
  return partial_covariance_across_edge(ball, covariance_matrix(ball, p));
}

QCoordinateSystem q_coordinates(const BallIndex& ball, int p_vertex, const WaveParams& p) {
  if (p_vertex < 0 || p_vertex >= ball.size() || ball.boundary[p_vertex])
    throw std::invalid_argument("q_coordinates: p must be an interior vertex");
  const int n = ball.size();
  const int d = ball.d;

  // BFS distances from p select, for each interior w != p, the neighbor of
  // w on the path toward p.
  std::vector<int> dist(n, -1), toward(n, -1), order{p_vertex};
  dist[p_vertex] = 0;
  for (std::size_t qi = 0; qi < order.size(); ++qi) {
    const int v = order[qi];
    for (int w : ball.adj[v]) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        toward[w] = v;
        order.push_back(w);
      }
    }
  }

  QCoordinateSystem sys;
  sys.expected_dim = eigenspace_dim(ball.kind, ball.d, ball.k);

  std::vector<Eigen::VectorXd> rows;
  // Centered star block at p.
  {
    QBlock blk;
    blk.name = "B_" + label_string(ball.labels[p_vertex]);
    blk.first_row = 0;
    for (int w : ball.adj[p_vertex]) {
      Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
      r(w) = 1.0;
      r(p_vertex) = -1.0;
      rows.push_back(r);
      ++blk.rows;
    }
    sys.blocks.push_back(blk);
  }
  // One child-difference block per remaining interior vertex, oriented away
  // from p: differences among the neighbors of w other than toward[w].
  for (int w = 0; w < n; ++w) {
    if (w == p_vertex || ball.boundary[w]) continue;
    std::vector<int> outer;
    for (int u : ball.adj[w])
      if (u != toward[w]) outer.push_back(u);
    QBlock blk;
    blk.name = "A_" + label_string(ball.labels[toward[w]]) + "->" +
               label_string(ball.labels[w]);
    blk.first_row = static_cast<int>(rows.size());
    for (int i = 0; i + 1 < static_cast<int>(outer.size()); ++i) {
      Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
      r(outer[i]) = 1.0;
      r(outer.back()) = -1.0;
      rows.push_back(r);
      ++blk.rows;
    }
    sys.blocks.push_back(blk);
  }

  sys.functionals.resize(static_cast<int>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    sys.functionals.row(static_cast<int>(i)) = rows[i].transpose();

  const Eigen::MatrixXd gram = wave_gram(ball, p);
  const Eigen::MatrixXd coord_cov =
      sys.functionals * gram * sys.functionals.transpose();

  for (std::size_t bi = 0; bi < sys.blocks.size(); ++bi) {
    const QBlock& a = sys.blocks[bi];
    for (std::size_t bj = bi + 1; bj < sys.blocks.size(); ++bj) {
      const QBlock& b = sys.blocks[bj];
      const double m = coord_cov.block(a.first_row, b.first_row, a.rows, b.rows)
                           .cwiseAbs()
                           .maxCoeff();
      sys.max_cross_covariance = std::max(sys.max_cross_covariance, m);
    }
  }

  const Eigen::VectorXd ev = sym_eigenvalues(coord_cov);
  sys.max_eigenvalue = ev.size() ? ev.maxCoeff() : 0.0;
  const double cut = 1e-8 * std::max(sys.max_eigenvalue, 0.0);
  long long kept = 0;
  double min_kept = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > cut) {
      if (kept == 0) min_kept = ev(i);
      min_kept = std::min(min_kept, ev(i));
      ++kept;
    }
  }
  sys.min_kept_eigenvalue = min_kept;
  sys.spans = kept == sys.expected_dim &&
              static_cast<long long>(rows.size()) == sys.expected_dim;
  return sys;
}

}  // namespace wavecheck
