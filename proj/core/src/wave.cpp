#include "wavecheck/wave.hpp"

#include <cmath>
#include <stdexcept>

namespace wavecheck {

double WaveParams::x() const { return lambda / (2.0 * std::sqrt(d - 1.0)); }

double WaveParams::spectral_radius() const { return 2.0 * std::sqrt(d - 1.0); }

bool WaveParams::in_spectrum() const {
  return std::abs(lambda) <= spectral_radius() * (1.0 + 1e-12);
}

double chebyshev_u(int k, double x) {
  if (k < -1) throw std::invalid_argument("chebyshev_u: k < -1");
  if (k == -1) return 0.0;
  double prev = 0.0, cur = 1.0;
  for (int i = 0; i < k; ++i) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double spherical_f(int k, const WaveParams& p) {
  if (k < 0) throw std::invalid_argument("spherical_f: k < 0");
  if (k == 0) return 1.0;
  const double d = p.d;
  const double x = p.x();
  const double q = std::sqrt((d - 1.0) / d) * chebyshev_u(k, x) -
                   chebyshev_u(k - 2, x) / std::sqrt(d * (d - 1.0));
  return q / std::sqrt(d * std::pow(d - 1.0, k - 1));
}

Eigen::MatrixXd wave_gram(const BallIndex& ball, const WaveParams& p) {
  const int n = ball.size();
  // Entries depend only on tree distance; tabulate once.
  const int dmax = 2 * ball.max_depth() + 1;
  std::vector<double> f(dmax + 1);
  for (int k = 0; k <= dmax; ++k) f[k] = spherical_f(k, p);
  Eigen::MatrixXd m(n, n);
  for (int u = 0; u < n; ++u) {
    m(u, u) = 1.0;
    for (int v = u + 1; v < n; ++v) {
      const double val = f[tree_distance(ball, u, v)];
      m(u, v) = val;
      m(v, u) = val;
    }
  }
  return m;
}

Eigen::MatrixXd covariance_matrix(const BallIndex& ball, const WaveParams& p) {
  if (p.d != ball.d)
    throw std::invalid_argument("covariance_matrix: degree mismatch");
  if (!p.in_spectrum())
    throw std::domain_error("covariance_matrix: |lambda| > 2 sqrt(d-1)");
  return wave_gram(ball, p);
}

namespace {

// Columns of V sqrt(max(eigenvalue, 0)) for eigenvalues above the clip
// threshold 1e-10 * max eigenvalue.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double clip = 1e-10 * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  int kept = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > clip) ++kept;
  Eigen::MatrixXd factor(m.rows(), kept);
  int col = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > clip) factor.col(col++) = es.eigenvectors().col(i) * std::sqrt(ev(i));
  }
  return factor;
}

}  // namespace

DirectWaveSampler::DirectWaveSampler(const BallIndex& ball, const WaveParams& p) {
  factor_ = psd_factor(covariance_matrix(ball, p));
}

Eigen::VectorXd DirectWaveSampler::draw(Rng& rng) const {
  Eigen::VectorXd z(factor_.cols());
  for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return factor_ * z;
}

MarkovWaveSampler::MarkovWaveSampler(const BallIndex& ball, const WaveParams& p)
    : ball_(&ball), d_(ball.d) {
  if (p.d != ball.d)
    throw std::invalid_argument("MarkovWaveSampler: degree mismatch");
  if (!p.in_spectrum())
    throw std::domain_error("MarkovWaveSampler: |lambda| > 2 sqrt(d-1)");
  const double f1 = spherical_f(1, p);
  const double f2 = spherical_f(2, p);
  const int d = ball.d;

  // Seed block: the central star (root plus its d children) or the central
  // edge.  Vertex ids 0..seed-1 are exactly these vertices in BFS order.
  if (ball.kind == BallKind::star) {
    const int m = std::min(ball.size(), d + 1);
    seed_vertices_.resize(m);
    for (int i = 0; i < m; ++i) seed_vertices_[i] = i;
    Eigen::MatrixXd seed(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        seed(i, j) = i == j ? 1.0 : (i == 0 || j == 0 ? f1 : f2);
    seed_factor_ = psd_factor(seed);
  } else {
    seed_vertices_ = {0, 1};
    Eigen::MatrixXd seed(2, 2);
    seed << 1.0, f1, f1, 1.0;
    seed_factor_ = psd_factor(seed);
  }

  // Conditional law of the d-1 outer children of a star with center w and
  // known neighbor v: covariance pattern cov(c,w)=f1, cov(c,v)=f2,
  // cov(c,c')=f2.  Shared by every extension step.
  Eigen::Matrix2d sbb;
  sbb << 1.0, f1, f1, 1.0;
  Eigen::RowVector2d scb(f1, f2);
  cond_coeff_ = scb * sbb.inverse();
  Eigen::MatrixXd scc = Eigen::MatrixXd::Constant(d - 1, d - 1, f2);
  scc.diagonal().setConstant(1.0);
  const Eigen::MatrixXd cross = Eigen::VectorXd::Ones(d - 1) * scb;
  const Eigen::MatrixXd cond_cov =
      scc - cross * sbb.inverse() * cross.transpose();
  cond_factor_ = psd_factor(cond_cov);

  children_.assign(ball.size(), {});
  for (int v = 0; v < ball.size(); ++v)
    if (ball.parent[v] >= 0) children_[ball.parent[v]].push_back(v);

  // Extension steps in BFS order: every vertex with children outside the
  // seed block.  For the edge ball that includes both roots.
  for (int v = 0; v < ball.size(); ++v) {
    if (children_[v].empty()) continue;
    if (ball.kind == BallKind::star && v == 0) continue;  // seeded with the star
    extend_order_.push_back(v);
  }
}

Eigen::VectorXd MarkovWaveSampler::draw(Rng& rng) const {
  const BallIndex& ball = *ball_;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ball.size());

  Eigen::VectorXd z(seed_factor_.cols());
  for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
  const Eigen::VectorXd seed = seed_factor_ * z;
  for (std::size_t i = 0; i < seed_vertices_.size(); ++i)
    out(seed_vertices_[i]) = seed(static_cast<int>(i));

  for (int w : extend_order_) {
    // Known neighbor on the inner side: the parent, or the opposite root.
    const int v = ball.parent[w] >= 0 ? ball.parent[w] : (w == 0 ? 1 : 0);
    const double mean_base = cond_coeff_(0) * out(w) + cond_coeff_(1) * out(v);
    Eigen::VectorXd zc(cond_factor_.cols());
    for (int i = 0; i < zc.size(); ++i) zc(i) = rng.normal();
    const Eigen::VectorXd noise = cond_factor_ * zc;
    const auto& kids = children_[w];
    for (std::size_t i = 0; i < kids.size(); ++i)
      out(kids[i]) = mean_base + noise(static_cast<int>(i));
  }
  return out;
}

Eigen::VectorXd sample_wave_direct(const BallIndex& ball, const WaveParams& p, Rng& rng) {
  return DirectWaveSampler(ball, p).draw(rng);
}

Eigen::VectorXd sample_wave_markov(const BallIndex& ball, const WaveParams& p, Rng& rng) {
  return MarkovWaveSampler(ball, p).draw(rng);
}

Eigen::VectorXd localized_vector(const RegularGraph& g, int center, int r,
                                 const WaveParams& p) {
  if (center < 0 || center >= g.n)
    throw std::invalid_argument("localized_vector: center out of range");
  if (r < 1) throw std::invalid_argument("localized_vector: r must be >= 1");
  if (g.d != p.d) throw std::invalid_argument("localized_vector: degree mismatch");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(g.n);
  std::vector<int> dist(g.n, -1), queue{center};
  dist[center] = 0;
  v(center) = 1.0;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int u = queue[qi];
    if (dist[u] >= r - 1) continue;
    for (int w : g.adj[u]) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        v(w) = spherical_f(dist[w], p);
        queue.push_back(w);
      }
    }
  }
  return v / v.norm();
}

KernelCoeffs linear_factor_coeffs(const WaveParams& p, int r) {
  if (r < 0) throw std::invalid_argument("linear_factor_coeffs: r < 0");
  const int d = p.d;
  const double lambda = p.lambda;
  const int n = r + 1;

  // Sphere sizes |S_m| on the tree.
  std::vector<double> sphere(r + 2);
  sphere[0] = 1.0;
  for (int m = 1; m <= r + 1; ++m)
    sphere[m] = d * std::pow(d - 1.0, m - 1);

  Eigen::VectorXd nw(n);
  for (int m = 0; m <= r; ++m) nw(m) = sphere[m];

  // Residual second moment: contribution of the center plus one term per
  // sphere.  At |u| = m >= 1 the neighbors of o sit at distances m-1 (once)
  // and m+1 (d-1 times) from u, so the residual coefficient there is
  // c_{m-1} + (d-1) c_{m+1} - lambda c_m.
  Eigen::MatrixXd quad = Eigen::MatrixXd::Zero(n, n);
  {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    row(0) = -lambda;
    if (r >= 1) row(1) = d;
    quad += row * row.transpose();
  }
  for (int m = 1; m <= r + 1; ++m) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    if (m - 1 <= r) row(m - 1) += 1.0;
    if (m + 1 <= r) row(m + 1) += d - 1.0;
    if (m <= r) row(m) -= lambda;
    quad += sphere[m] * row * row.transpose();
  }

  // Minimize c^T quad c subject to c^T diag(nw) c = 1.
  const Eigen::VectorXd scale = nw.cwiseSqrt();
  Eigen::MatrixXd b = quad;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) /= scale(i) * scale(j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  Eigen::VectorXd c = es.eigenvectors().col(0).cwiseQuotient(scale);

  // Sign convention: first nonzero coefficient positive.
  for (int i = 0; i < n; ++i) {
    if (std::abs(c(i)) > 1e-14) {
      if (c(i) < 0) c = -c;
      break;
    }
  }

  KernelCoeffs kc;
  kc.r = r;
  kc.c = c;
  kc.objective = std::max(es.eigenvalues()(0), 0.0);
  return kc;
}

Eigen::VectorXd apply_local_kernel(const RegularGraph& g, const KernelCoeffs& kc,
                                   Rng& rng) {
  Eigen::VectorXd z(g.n);
  for (int i = 0; i < g.n; ++i) z(i) = rng.normal();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(g.n);
  std::vector<int> dist(g.n, -1), queue;
  queue.reserve(g.n);
  for (int v = 0; v < g.n; ++v) {
    queue.clear();
    queue.push_back(v);
    dist[v] = 0;
    double acc = kc.c(0) * z(v);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int u = queue[qi];
      if (dist[u] >= kc.r) continue;
      for (int w : g.adj[u]) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          acc += kc.c(dist[w]) * z(w);
          queue.push_back(w);
        }
      }
    }
    y(v) = acc;
    for (int u : queue) dist[u] = -1;
  }
  return y / y.norm();
}

}  // namespace wavecheck
