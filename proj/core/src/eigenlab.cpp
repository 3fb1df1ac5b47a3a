#include "wavecheck/eigenlab.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "wavecheck/dense_eig.hpp"

namespace wavecheck {

namespace {

void adjacency_matvec(const RegularGraph& g, const Eigen::VectorXd& v, Eigen::VectorXd& out) {
  out.setZero();
  for (int u = 0; u < g.n; ++u) {
    double acc = 0.0;
    for (int w : g.adj[u]) acc += v(w);
    out(u) = acc;
  }
}

Eigen::MatrixXd dense_adjacency(const RegularGraph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n, g.n);
  for (int u = 0; u < g.n; ++u)
    for (int w : g.adj[u]) a(u, w) = 1.0;
  return a;
}

// Lanczos with full reorthogonalization.  locked columns (if any) occupy
// the front of basis and are deflated, not expanded.  Returns Ritz pairs of
// the extreme `want` eigenvalues from each end once their residuals drop
// below tol; throws after cap iterations.
struct LanczosResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // matching Ritz vectors
};

LanczosResult lanczos_extreme(const RegularGraph& g, int want, int locked_constant,
                              std::uint64_t seed) {
  const int n = g.n;
  const double tol = 1e-8 * g.d;
  const int cap = static_cast<int>(10.0 * std::sqrt(static_cast<double>(n))) + 32;
  const int max_basis = std::min(n - locked_constant, cap);

  Eigen::MatrixXd basis(n, locked_constant + max_basis);
  if (locked_constant)
    basis.col(0) = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));

  Rng rng(seed);
  Eigen::VectorXd v(n), w(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < locked_constant; ++c) v -= basis.col(c).dot(v) * basis.col(c);
  v.normalize();

  std::vector<double> alpha, beta;  // beta[j] links v_j to v_{j+1}
  int m = 0;

  // Ritz pairs of the current tridiagonal; empty result when a requested
  // extreme pair still has residual |beta_m * s_m| above tol (skipped for
  // an exactly invariant Krylov space).
  const auto ritz = [&](bool exact_subspace) -> LanczosResult {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::VectorXd tvals;
    Eigen::MatrixXd tvecs;
    sym_eigen(t, tvals, tvecs);

    const int keep = std::min(want, m);
    std::vector<int> chosen;
    for (int i = 0; i < keep; ++i) chosen.push_back(i);
    for (int i = std::max(keep, m - keep); i < m; ++i) chosen.push_back(i);

    if (!exact_subspace) {
      const double edge = beta[m - 1];
      for (int i : chosen)
        if (std::abs(edge * tvecs(m - 1, i)) > tol) return {};
    }

    LanczosResult res;
    res.values.resize(static_cast<int>(chosen.size()));
    res.vectors.resize(n, static_cast<int>(chosen.size()));
    for (std::size_t c = 0; c < chosen.size(); ++c) {
      res.values(static_cast<int>(c)) = tvals(chosen[c]);
      res.vectors.col(static_cast<int>(c)) =
          basis.middleCols(locked_constant, m) * tvecs.col(chosen[c]);
      res.vectors.col(static_cast<int>(c)).normalize();
    }
    return res;
  };

  for (int j = 0; j < max_basis; ++j) {
    basis.col(locked_constant + j) = v;
    m = j + 1;
    adjacency_matvec(g, v, w);
    const double a = v.dot(w);
    alpha.push_back(a);
    w -= a * v;
    if (j > 0) w -= beta[j - 1] * basis.col(locked_constant + j - 1);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < locked_constant + m; ++c) w -= basis.col(c).dot(w) * basis.col(c);
    const double b = w.norm();

    if (b < 1e-12 * g.d) return ritz(true);  // invariant subspace found
    if (j + 1 == max_basis) break;
    beta.push_back(b);
    v = w / b;

    if (m >= 2 * want && m % 8 == 0) {
      const LanczosResult res = ritz(false);
      if (res.values.size()) return res;
    }
  }
  if (m == n - locked_constant) return ritz(true);  // whole space spanned
  if (m >= 2 && static_cast<int>(beta.size()) == m - 1) {
    beta.push_back(w.norm());
    const LanczosResult res = ritz(false);
    beta.pop_back();
    if (res.values.size()) return res;
  }
  throw std::runtime_error("lanczos: no convergence within the iteration cap");
}

}  // namespace

SpectralData eigendecompose(const RegularGraph& g, EigMode mode, std::uint64_t seed) {
  SpectralData sd;
  sd.mode = mode;
  switch (mode) {
    case EigMode::dense: {
      if (g.n > 4096) throw std::invalid_argument("eigendecompose: dense mode caps at n=4096");
      sym_eigen(dense_adjacency(g), sd.eigenvalues, sd.eigenvectors);
      break;
    }
    case EigMode::dense_values: {
      sd.eigenvalues = sym_eigenvalues(dense_adjacency(g));
      break;
    }
    case EigMode::extreme: {
      const LanczosResult res = lanczos_extreme(g, 8, 0, seed);
      sd.eigenvalues = res.values;
      sd.eigenvectors = res.vectors;
      break;
    }
  }
  return sd;
}

double lambda2(const RegularGraph& g, bool* disconnected) {
  if (disconnected) *disconnected = !is_connected(g);
  const LanczosResult res = lanczos_extreme(g, 8, 1, 0x6c616d62646132ull);
  return res.values.cwiseAbs().maxCoeff();
}

double residual(const RegularGraph& g, const Eigen::VectorXd& v, double lambda) {
  if (v.size() != g.n) throw std::invalid_argument("residual: size mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("residual: vector must have unit norm");
  Eigen::VectorXd av(g.n);
  adjacency_matvec(g, v, av);
  return (av - lambda * v).norm();
}

Eigen::VectorXd spectral_window_vector(const SpectralData& sd, double lambda, double eps,
                                       Rng& rng) {
  if (sd.mode != EigMode::dense)
    throw std::invalid_argument("spectral_window_vector: dense spectral data required");
  const int n = static_cast<int>(sd.eigenvectors.rows());
  const double root_n = std::sqrt(static_cast<double>(n));

  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  bool any = false;
  for (int i = 0; i < sd.eigenvalues.size(); ++i) {
    if (std::abs(sd.eigenvalues(i) - lambda) > eps) continue;
    // Skip the constant eigenvector (eigenvalue d on a connected graph).
    if (std::abs(sd.eigenvectors.col(i).sum()) / root_n > 0.99) continue;
    any = true;
    v += rng.normal() * sd.eigenvectors.col(i);
  }
  if (!any) throw std::invalid_argument("spectral_window_vector: empty window");
  v.normalize();
  return v;
}

AlmostEigReport almost_eig_bound_check(const RegularGraph& g, const Eigen::VectorXd& v,
                                       double lambda, double eps) {
  AlmostEigReport rep;
  rep.entry_sum = std::abs(v.sum());
  rep.residual_value = residual(g, v, lambda);
  rep.lambda2_value = lambda2(g);
  rep.sum_ok = rep.entry_sum <= 1e-8;
  rep.residual_ok = rep.residual_value <= eps;
  rep.holds = rep.sum_ok && rep.residual_ok &&
              std::abs(lambda) <= rep.lambda2_value + eps + 1e-6;
  return rep;
}

double kesten_mckay_density(int d, double x) {
  const double edge2 = 4.0 * (d - 1.0);
  if (x * x >= edge2) return 0.0;
  return d * std::sqrt(edge2 - x * x) / (2.0 * M_PI * (d * d - x * x));
}

double kesten_mckay_distance(const SpectralData& sd, int d, int bins) {
  if (sd.mode == EigMode::extreme)
    throw std::invalid_argument("kesten_mckay_distance: full spectrum required");
  if (bins < 1) throw std::invalid_argument("kesten_mckay_distance: bins must be >= 1");
  const int n = static_cast<int>(sd.eigenvalues.size());
  if (n < 2) throw std::invalid_argument("kesten_mckay_distance: spectrum too small");

  // Drop one eigenvalue nearest d (the constant eigenvector's).
  int drop = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(sd.eigenvalues(i) - d) < std::abs(sd.eigenvalues(drop) - d)) drop = i;

  const double edge = 2.0 * std::sqrt(d - 1.0);
  std::vector<double> emp(bins, 0.0);
  double outside = 0.0;
  const double weight = 1.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    if (i == drop) continue;
    const double x = sd.eigenvalues(i);
    if (x < -edge || x > edge) {
      outside += weight;
      continue;
    }
    int b = static_cast<int>((x + edge) / (2.0 * edge) * bins);
    b = std::min(std::max(b, 0), bins - 1);
    emp[b] += weight;
  }

  // Bin masses of the limiting density via Simpson, normalized so the
  // quadrature drift does not register as distance.
  std::vector<double> model(bins, 0.0);
  double total = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double lo = -edge + 2.0 * edge * b / bins;
    const double hi = -edge + 2.0 * edge * (b + 1) / bins;
    const int steps = 64;
    double acc = 0.0;
    for (int s = 0; s < steps; ++s) {
      const double a0 = lo + (hi - lo) * s / steps;
      const double a1 = lo + (hi - lo) * (s + 1) / steps;
      acc += (a1 - a0) / 6.0 *
             (kesten_mckay_density(d, a0) + 4.0 * kesten_mckay_density(d, 0.5 * (a0 + a1)) +
              kesten_mckay_density(d, a1));
    }
    model[b] = acc;
    total += acc;
  }
  for (double& q : model) q /= total;

  double tv = outside;
  for (int b = 0; b < bins; ++b) tv += std::abs(emp[b] - model[b]);
  return 0.5 * tv;
}

void write_spectrum_csv(const SpectralData& sd, std::ostream& os, bool with_vectors) {
  os << "lambda";
  if (with_vectors)
    for (int j = 0; j < sd.eigenvectors.rows(); ++j) os << ",v" << j;
  os << "\n";
  char buf[32];
  for (int i = 0; i < sd.eigenvalues.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", sd.eigenvalues(i));
    os << buf;
    if (with_vectors) {
      for (int j = 0; j < sd.eigenvectors.rows(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", sd.eigenvectors(j, i));
        os << ',' << buf;
      }
    }
    os << "\n";
  }
}

}  // namespace wavecheck
