#include "wavecheck/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "wavecheck/dense_eig.hpp"
#include "wavecheck/stats.hpp"
#include "wavecheck/tree_ball.hpp"

namespace wavecheck {

namespace {

constexpr double kTwoPiE = 2.0 * M_PI * M_E;

// Row-major kd-tree over the sample points; queries exclude the query
// point itself by index.
class KdTree {
 public:
  explicit KdTree(const Eigen::MatrixXd& pts)
      : n_(static_cast<int>(pts.rows())),
        m_(static_cast<int>(pts.cols())),
        data_(static_cast<std::size_t>(n_) * m_),
        order_(n_) {
    for (int i = 0; i < n_; ++i) {
      order_[i] = i;
      for (int j = 0; j < m_; ++j) data_[static_cast<std::size_t>(i) * m_ + j] = pts(i, j);
    }
    root_ = build(0, n_, 0);
  }

  // Squared distance to the k-th nearest neighbor of point `self`.
  double knn_sq_distance(int self, int k) const {
    std::vector<double> heap;  // max-heap of the k best squared distances
    heap.reserve(k);
    query(root_, point(self), self, k, heap);
    return heap.front();
  }

 private:
  static constexpr int kLeaf = 16;

  struct Node {
    int lo, hi;
    int left = -1, right = -1;
    int dim = 0;
    double split = 0.0;
  };

  const double* point(int i) const { return &data_[static_cast<std::size_t>(i) * m_]; }

  int build(int lo, int hi, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{lo, hi});
    if (hi - lo > kLeaf) {
      const int dim = depth % m_;
      const int mid = (lo + hi) / 2;
      std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                       [&](int a, int b) { return point(a)[dim] < point(b)[dim]; });
      const double split = point(order_[mid])[dim];
      const int left = build(lo, mid, depth + 1);
      const int right = build(mid, hi, depth + 1);
      nodes_[id].left = left;
      nodes_[id].right = right;
      nodes_[id].dim = dim;
      nodes_[id].split = split;
    }
    return id;
  }

  void query(int id, const double* q, int self, int k, std::vector<double>& heap) const {
    const Node& node = nodes_[id];
    if (node.left < 0) {
      for (int i = node.lo; i < node.hi; ++i) {
        const int p = order_[i];
        if (p == self) continue;
        const double* r = point(p);
        double dist = 0.0;
        for (int j = 0; j < m_; ++j) {
          const double gap = r[j] - q[j];
          dist += gap * gap;
        }
        if (static_cast<int>(heap.size()) < k) {
          heap.push_back(dist);
          std::push_heap(heap.begin(), heap.end());
        } else if (dist < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = dist;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      return;
    }
    const double gap = q[node.dim] - node.split;
    const int near = gap < 0.0 ? node.left : node.right;
    const int far = gap < 0.0 ? node.right : node.left;
    query(near, q, self, k, heap);
    if (static_cast<int>(heap.size()) < k || gap * gap < heap.front())
      query(far, q, self, k, heap);
  }

  int n_, m_;
  std::vector<double> data_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = 0;
};

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

}  // namespace

EntropyEstimate gaussian_entropy_sp(const Eigen::MatrixXd& cov, long long expected_rank) {
  double logdet_sp_value;
  {
    const Eigen::VectorXd ev = sym_eigenvalues(cov);
    const double cut = 1e-8 * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    long long kept = 0;
    double acc = 0.0;
    for (int i = 0; i < ev.size(); ++i) {
      if (ev(i) > cut) {
        ++kept;
        acc += std::log(ev(i));
      }
    }
    if (kept != expected_rank)
      throw std::runtime_error("gaussian_entropy_sp: rank " + std::to_string(kept) +
                               ", expected " + std::to_string(expected_rank));
    logdet_sp_value = acc;
  }
  return {0.5 * (expected_rank * std::log(kTwoPiE) + logdet_sp_value), 0.0,
          EntropyMethod::closed_form};
}

EntropyEstimate knn_entropy(const Eigen::MatrixXd& samples, int k) {
  const int n = static_cast<int>(samples.rows());
  const int m = static_cast<int>(samples.cols());
  if (n < 100) throw std::invalid_argument("knn_entropy: need at least 100 samples");
  if (m < 1 || m > 8) throw std::invalid_argument("knn_entropy: dimension must be 1..8");
  if (k < 1 || k >= n) throw std::invalid_argument("knn_entropy: bad neighbor index");

  {
    const Eigen::VectorXd center = samples.colwise().mean();
    const Eigen::MatrixXd centered = samples.rowwise() - center.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.eigenvalues()(0) < 1e-10 * es.eigenvalues()(m - 1))
      throw std::invalid_argument("knn_entropy: degenerate sample cloud, project first");
  }

  // Deterministic tie-breaking jitter.
  Eigen::MatrixXd pts = samples;
  Rng jitter_rng(0x6a69747465726a67ull);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) pts(i, j) += 1e-12 * jitter_rng.normal();

  const KdTree tree(pts);
  std::vector<double> contrib(n);
  parallel_for(n, [&](std::size_t i) {
    const double eps = std::sqrt(tree.knn_sq_distance(static_cast<int>(i), k));
    contrib[i] = m * std::log(std::max(eps, 1e-290));
  });

  const MeanStderr ms = mean_stderr(contrib);
  const double log_vm = 0.5 * m * std::log(M_PI) - std::lgamma(0.5 * m + 1.0);
  return {digamma(n) - digamma(k) + log_vm + ms.mean, ms.stderr_, EntropyMethod::knn};
}

double discretize_t(double x, const DiscretizationParams& dp, Rng& rng) {
  const double a = dp.a;
  const double y = dp.sigma > 0.0 ? x + dp.sigma * rng.normal() : x;
  if (y > a) return a;
  if (y < -a) return -a;
  const double z = y * a;
  const double r = std::floor(z);
  const double frac = z - r;
  return (rng.uniform() < 1.0 - frac ? r : r + 1.0) / a;
}

std::vector<double> rounded_normal_pmf(double mean, double sd, int a) {
  if (a < 1) throw std::invalid_argument("rounded_normal_pmf: a must be positive");
  if (sd < 0.0) throw std::invalid_argument("rounded_normal_pmf: sd must be >= 0");
  const long long asq = static_cast<long long>(a) * a;
  std::vector<double> pmf(2 * asq + 1, 0.0);

  if (sd == 0.0) {
    if (mean >= a) {
      pmf[2 * asq] = 1.0;
    } else if (mean <= -a) {
      pmf[0] = 1.0;
    } else {
      const double z = mean * a;
      const double r = std::floor(z);
      const double frac = z - r;
      const long long i = static_cast<long long>(r) + asq;
      pmf[i] += 1.0 - frac;
      if (frac > 0.0) pmf[i + 1] += frac;
    }
    return pmf;
  }

  const double mu = mean * a;
  const double s = sd * a;
  const auto prob = [&](double c, double e) {
    return normal_cdf((e - mu) / s) - normal_cdf((c - mu) / s);
  };
  const auto pmean = [&](double c, double e) {  // E[Z 1{c<=Z<=e}]
    return mu * prob(c, e) + s * (std_normal_pdf((c - mu) / s) - std_normal_pdf((e - mu) / s));
  };

  const double lo_reach = mu - 12.0 * s - 2.0;
  const double hi_reach = mu + 12.0 * s + 2.0;
  const long long r_lo = std::max(-asq, static_cast<long long>(std::floor(lo_reach)));
  const long long r_hi = std::min(asq, static_cast<long long>(std::ceil(hi_reach)));
  for (long long r = r_lo; r <= r_hi; ++r) {
    double p = 0.0;
    if (r > -asq) p += pmean(r - 1.0, r) - (r - 1.0) * prob(r - 1.0, r);
    if (r < asq) p += (r + 1.0) * prob(r, r + 1.0) - pmean(r, r + 1.0);
    if (r == asq) p += 1.0 - normal_cdf((asq - mu) / s);
    if (r == -asq) p += normal_cdf((-asq - mu) / s);
    pmf[r + asq] = std::max(p, 0.0);
  }
  return pmf;
}

double discrete_entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double rounded_normal_entropy(double mean, double sd, int a) {
  return discrete_entropy(rounded_normal_pmf(mean, sd, a));
}

EntropyEstimate plug_in_entropy(const std::vector<long long>& counts) {
  long long n = 0;
  for (long long c : counts) n += c;
  if (n < 1) throw std::invalid_argument("plug_in_entropy: empty histogram");
  double h = 0.0, second = 0.0;
  long long observed = 0;
  for (long long c : counts) {
    if (c <= 0) continue;
    ++observed;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
    second += p * std::log(p) * std::log(p);
  }
  const double var = std::max(0.0, second - h * h);
  const double se = std::sqrt(var / n) + (observed - 1.0) / (2.0 * n);
  return {h, se, EntropyMethod::plug_in};
}

std::vector<LadderRow> discretization_ladder_check(
    const std::function<Eigen::VectorXd(Rng&)>& sample_x, int dim, double sigma,
    const std::vector<int>& a_ladder, long long samples,
    std::optional<double> target, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("discretization_ladder_check: bad dimension");

  double tgt;
  if (target) {
    tgt = *target;
  } else {
    const long long n_est = std::min<long long>(samples, 100000);
    Eigen::MatrixXd pts(n_est, dim);
    for (long long i = 0; i < n_est; ++i) {
      const Eigen::VectorXd x = sample_x(rng);
      for (int j = 0; j < dim; ++j) pts(i, j) = x(j) + sigma * rng.normal();
    }
    tgt = knn_entropy(pts).value;
  }

  std::vector<LadderRow> out;
  for (int a : a_ladder) {
    const double base = 2.0 * a * a + 1.0;
    if (std::pow(base, dim) > 1e7)
      throw std::invalid_argument("discretization_ladder_check: alphabet exceeds 1e7 bins");
    const long long ibase = static_cast<long long>(base);
    const long long asq = static_cast<long long>(a) * a;

    const DiscretizationParams dp{sigma, a};
    std::unordered_map<long long, long long> hist;
    for (long long i = 0; i < samples; ++i) {
      const Eigen::VectorXd x = sample_x(rng);
      long long code = 0;
      for (int j = 0; j < dim; ++j) {
        const double t = discretize_t(x(j), dp, rng);
        code = code * ibase + (std::llround(t * a) + asq);
      }
      ++hist[code];
    }
    std::vector<long long> counts;
    counts.reserve(hist.size());
    for (const auto& kv : hist) counts.push_back(kv.second);

    LadderRow row;
    row.a = a;
    row.discrete = plug_in_entropy(counts);
    row.shifted = row.discrete.value - dim * std::log(static_cast<double>(a));
    row.target = tgt;
    row.gap = row.shifted - tgt;
    out.push_back(row);
  }
  return out;
}

EntropyEstimate functional_D(const Eigen::MatrixXd& samples, const WaveParams& p) {
  const int d = p.d;
  const int n = static_cast<int>(samples.rows());
  if (samples.cols() != d + 1)
    throw std::invalid_argument("functional_D: samples must have d+1 columns");

  for (int i = 0; i < n; ++i) {
    const double sum = samples.row(i).tail(d).sum();
    const double scale = std::max(1.0, samples.row(i).cwiseAbs().maxCoeff());
    if (std::abs(sum - p.lambda * samples(i, 0)) > 1e-8 * scale)
      throw std::invalid_argument("functional_D: eigenvector constraint violated");
  }

  // Fixed coordinates on the constraint subspace: eigenvectors of the wave
  // covariance of the central star, whitened by its eigenvalues, so the
  // Gaussian wave maps to identity covariance.
  const BallIndex ball = build_ball(BallKind::star, d, 0);
  const Eigen::MatrixXd sigma0 = covariance_matrix(ball, p);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma0);
  const double cut = 1e-8 * es.eigenvalues().cwiseAbs().maxCoeff();
  int first_kept = 0;
  while (first_kept <= d && es.eigenvalues()(first_kept) <= cut) ++first_kept;
  const int kept = d + 1 - first_kept;
  if (kept != d)
    throw std::runtime_error("functional_D: unexpected wave covariance rank");
  const Eigen::MatrixXd basis = es.eigenvectors().rightCols(d);
  const Eigen::VectorXd evs = es.eigenvalues().tail(d);

  const Eigen::MatrixXd mapped =
      samples * basis * evs.cwiseSqrt().cwiseInverse().asDiagonal();
  const EntropyEstimate h_mapped = knn_entropy(mapped);
  const double h_sp = h_mapped.value + 0.5 * evs.array().log().sum();

  Eigen::MatrixXd pair(n, 2);
  pair.col(0) = samples.col(0);
  pair.col(1) = samples.col(1);
  const EntropyEstimate h_pair = knn_entropy(pair);

  const double half_d = 0.5 * d;
  return {h_sp - d * 0.5 * h_pair.value,
          std::sqrt(h_mapped.stderr_ * h_mapped.stderr_ +
                    half_d * half_d * h_pair.stderr_ * h_pair.stderr_),
          EntropyMethod::knn};
}

double functional_D_gaussian(const WaveParams& p) {
  const BallIndex ball = build_ball(BallKind::star, p.d, 0);
  const Eigen::MatrixXd sigma0 = covariance_matrix(ball, p);
  const double h_sp = gaussian_entropy_sp(sigma0, p.d).value;
  const double f1 = spherical_f(1, p);
  const double h_pair = std::log(kTwoPiE) + 0.5 * std::log1p(-f1 * f1);
  return h_sp - 0.5 * p.d * h_pair;
}

namespace {

struct MixtureFrozen {
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> inv_covs;
  std::vector<double> norms;  // (2 pi)^{-m/2} det^{-1/2}
  int dim;

  explicit MixtureFrozen(const GaussianMixture& gm) : dim(gm.dim()) {
    if (gm.weights.empty() || gm.weights.size() != gm.means.size() ||
        gm.weights.size() != gm.covs.size())
      throw std::invalid_argument("mixture: inconsistent component lists");
    if (dim < 1 || dim > 2) throw std::invalid_argument("mixture: dimension must be 1 or 2");
    for (std::size_t i = 0; i < gm.weights.size(); ++i) {
      const Eigen::LLT<Eigen::MatrixXd> llt(gm.covs[i]);
      if (llt.info() != Eigen::Success)
        throw std::invalid_argument("mixture: component covariance not positive definite");
      weights.push_back(gm.weights[i]);
      means.push_back(gm.means[i]);
      inv_covs.push_back(llt.solve(Eigen::MatrixXd::Identity(dim, dim)));
      double logdet = 0.0;
      for (int j = 0; j < dim; ++j) logdet += 2.0 * std::log(llt.matrixL()(j, j));
      norms.push_back(std::exp(-0.5 * (dim * std::log(2.0 * M_PI) + logdet)));
    }
  }

  double density(const Eigen::VectorXd& x) const {
    double f = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const Eigen::VectorXd q = x - means[i];
      f += weights[i] * norms[i] * std::exp(-0.5 * q.dot(inv_covs[i] * q));
    }
    return f;
  }

  void density_grad(const Eigen::VectorXd& x, double& f, Eigen::VectorXd& grad) const {
    f = 0.0;
    grad = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const Eigen::VectorXd q = x - means[i];
      const Eigen::VectorXd iq = inv_covs[i] * q;
      const double fi = weights[i] * norms[i] * std::exp(-0.5 * q.dot(iq));
      f += fi;
      grad -= fi * iq;
    }
  }
};

double adaptive_simpson(const std::function<double(double)>& g, double lo, double hi,
                        double f_lo, double f_mid, double f_hi, double whole, double tol,
                        int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid), mh = 0.5 * (mid + hi);
  const double f_lm = g(lm), f_mh = g(mh);
  const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
  const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_mh + f_hi);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return adaptive_simpson(g, lo, mid, f_lo, f_lm, f_mid, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(g, mid, hi, f_mid, f_mh, f_hi, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& g, double lo, double hi, double tol) {
  const double mid = 0.5 * (lo + hi);
  const double f_lo = g(lo), f_mid = g(mid), f_hi = g(hi);
  const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
  return adaptive_simpson(g, lo, hi, f_lo, f_mid, f_hi, whole, tol, 36);
}

void mixture_bounds(const MixtureFrozen& mf, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  const int m = mf.dim;
  lo = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
  hi = -lo;
  double max_sd = 0.0;
  for (std::size_t i = 0; i < mf.means.size(); ++i) {
    const Eigen::MatrixXd cov = mf.inv_covs[i].inverse();
    max_sd = std::max(max_sd, std::sqrt(cov.diagonal().maxCoeff()));
    lo = lo.cwiseMin(mf.means[i]);
    hi = hi.cwiseMax(mf.means[i]);
  }
  lo.array() -= 14.0 * max_sd;
  hi.array() += 14.0 * max_sd;
}

double mixture_integral(const MixtureFrozen& mf,
                        const std::function<double(const Eigen::VectorXd&)>& integrand) {
  Eigen::VectorXd lo, hi;
  mixture_bounds(mf, lo, hi);
  if (mf.dim == 1) {
    return integrate(
        [&](double x) {
          Eigen::VectorXd v(1);
          v << x;
          return integrand(v);
        },
        lo(0), hi(0), 1e-11);
  }
  return integrate(
      [&](double x) {
        return integrate(
            [&](double y) {
              Eigen::VectorXd v(2);
              v << x, y;
              return integrand(v);
            },
            lo(1), hi(1), 1e-12);
      },
      lo(0), hi(0), 1e-9);
}

}  // namespace

GaussianMixture heat(const GaussianMixture& gm, double t) {
  GaussianMixture out = gm;
  for (auto& cov : out.covs)
    cov += 2.0 * t * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
  return out;
}

double mixture_entropy(const GaussianMixture& gm) {
  const MixtureFrozen mf(gm);
  return mixture_integral(mf, [&](const Eigen::VectorXd& x) {
    const double f = mf.density(x);
    return f > 1e-300 ? -f * std::log(f) : 0.0;
  });
}

double mixture_fisher(const GaussianMixture& gm) {
  const MixtureFrozen mf(gm);
  return mixture_integral(mf, [&](const Eigen::VectorXd& x) {
    double f;
    Eigen::VectorXd grad;
    mf.density_grad(x, f, grad);
    return f > 1e-300 ? grad.squaredNorm() / f : 0.0;
  });
}

std::vector<DeBruijnRow> debruijn_check(const GaussianMixture& gm,
                                        const std::vector<double>& t_grid) {
  std::vector<DeBruijnRow> out;
  for (double t : t_grid) {
    const double h = t > 0.0 ? std::min(1e-4, 0.5 * t) : 1e-4;
    if (t < 0.0) throw std::invalid_argument("debruijn_check: t must be >= 0");
    DeBruijnRow row;
    row.t = t;
    row.entropy = mixture_entropy(heat(gm, t));
    const double h_plus = mixture_entropy(heat(gm, t + h));
    const double h_minus = t > 0.0 ? mixture_entropy(heat(gm, t - h)) : row.entropy;
    row.entropy_derivative =
        t > 0.0 ? (h_plus - h_minus) / (2.0 * h) : (h_plus - row.entropy) / h;
    row.fisher = mixture_fisher(heat(gm, t));
    row.rel_err = std::abs(row.entropy_derivative - row.fisher) /
                  std::max(std::abs(row.fisher), 1e-300);
    out.push_back(row);
  }
  return out;
}

namespace {

double gaussian_block_entropy(const Eigen::MatrixXd& cov, const std::vector<int>& idx) {
  const int m = static_cast<int>(idx.size());
  if (m == 0) return 0.0;
  Eigen::MatrixXd block(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) block(i, j) = cov(idx[i], idx[j]);
  const Eigen::LLT<Eigen::MatrixXd> llt(block);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("submodularity_check: covariance not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < m; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return 0.5 * (m * std::log(kTwoPiE) + logdet);
}

}  // namespace

SubmodularityReport submodularity_check(const Eigen::MatrixXd& cov, int nx, int ny, int nz) {
  if (nx < 1 || ny < 1 || nz < 0 || nx + ny + nz != cov.rows())
    throw std::invalid_argument("submodularity_check: bad block sizes");
  std::vector<int> xs, ys, zs, xz, yz, xyz;
  for (int i = 0; i < nx; ++i) xs.push_back(i);
  for (int i = 0; i < ny; ++i) ys.push_back(nx + i);
  for (int i = 0; i < nz; ++i) zs.push_back(nx + ny + i);
  xz = xs;
  xz.insert(xz.end(), zs.begin(), zs.end());
  yz = ys;
  yz.insert(yz.end(), zs.begin(), zs.end());
  xyz = xs;
  xyz.insert(xyz.end(), ys.begin(), ys.end());
  xyz.insert(xyz.end(), zs.begin(), zs.end());

  SubmodularityReport rep;
  rep.h_xyz = gaussian_block_entropy(cov, xyz);
  rep.h_xz = gaussian_block_entropy(cov, xz);
  rep.h_yz = gaussian_block_entropy(cov, yz);
  rep.h_z = gaussian_block_entropy(cov, zs);
  rep.gap = rep.h_xz + rep.h_yz - rep.h_z - rep.h_xyz;
  rep.holds = rep.gap >= -1e-12;

  Eigen::MatrixXd partial = cov.block(0, nx, nx, ny);
  if (nz > 0) {
    const Eigen::MatrixXd szz = cov.block(nx + ny, nx + ny, nz, nz);
    const Eigen::MatrixXd sxz = cov.block(0, nx + ny, nx, nz);
    const Eigen::MatrixXd szy = cov.block(nx + ny, nx, nz, ny);
    partial -= sxz * szz.llt().solve(szy);
  }
  rep.equality = partial.cwiseAbs().maxCoeff() < 1e-10;
  return rep;
}

}  // namespace wavecheck
