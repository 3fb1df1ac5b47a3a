#include "wavecheck/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wavecheck {

RegularGraph random_regular(int n, int d, Rng& rng, int max_attempts) {
  if (d < 3) throw std::invalid_argument("random_regular: d must be >= 3");
  if (n <= d) throw std::invalid_argument("random_regular: n must exceed d");
  if ((static_cast<long long>(n) * d) % 2 != 0)
    throw std::invalid_argument("random_regular: n*d must be even");

  const int m = n * d;
  std::vector<int> points(m);
  for (int i = 0; i < m; ++i) points[i] = i / d;  // owner vertex of each half-edge

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    // Fisher-Yates with explicit bounded draws; pairing = consecutive pairs.
    std::vector<int> p = points;
    for (int i = m - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[i], p[j]);
    }
    bool simple = true;
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < m && simple; i += 2) {
      const int u = p[i], v = p[i + 1];
      if (u == v) {
        simple = false;
        break;
      }
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    if (!simple) continue;
    for (int v = 0; v < n && simple; ++v) {
      std::sort(adj[v].begin(), adj[v].end());
      if (std::adjacent_find(adj[v].begin(), adj[v].end()) != adj[v].end())
        simple = false;
    }
    if (!simple) continue;
    RegularGraph g;
    g.n = n;
    g.d = d;
    g.adj = std::move(adj);
    return g;
  }
  throw std::runtime_error("random_regular: no simple pairing found within attempt cap");
}

bool is_connected(const RegularGraph& g) {
  if (g.n == 0) return true;
  std::vector<char> seen(g.n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : g.adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == g.n;
}

std::vector<int> cycle_length_through(const RegularGraph& g, int l_max) {
  // Truncated BFS from each vertex.  A non-tree edge whose endpoints sit in
  // different root branches closes a cycle through the root of length
  // dist(v) + dist(w) + 1; same-branch non-tree edges close cycles that
  // avoid the root and are ignored here.
  std::vector<int> result(g.n, l_max + 1);
  const int depth_cap = l_max / 2 + 1;
  std::vector<int> dist(g.n, -1), branch(g.n, -1), parent(g.n, -1), order;
  order.reserve(g.n);
  for (int root = 0; root < g.n; ++root) {
    order.clear();
    order.push_back(root);
    dist[root] = 0;
    branch[root] = root;
    int best = l_max + 1;
    for (std::size_t qi = 0; qi < order.size(); ++qi) {
      const int v = order[qi];
      if (dist[v] >= depth_cap) continue;
      for (int w : g.adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          parent[w] = v;
          branch[w] = v == root ? w : branch[v];
          order.push_back(w);
        } else if (w != parent[v] && v != parent[w] && branch[v] != branch[w]) {
          best = std::min(best, dist[v] + dist[w] + 1);
        }
      }
    }
    result[root] = std::min(best, l_max + 1);
    for (int v : order) {
      dist[v] = -1;
      branch[v] = -1;
      parent[v] = -1;
    }
  }
  return result;
}

double essential_girth_omega(const RegularGraph& g, int l_max) {
  if (l_max < 3) throw std::invalid_argument("essential_girth_omega: l_max < 3");
  const std::vector<int> cyc = cycle_length_through(g, l_max);
  // frac[l] = fraction of vertices on a cycle of length <= l.
  std::vector<double> frac(l_max + 1, 0.0);
  for (int v = 0; v < g.n; ++v) {
    if (cyc[v] <= l_max) frac[cyc[v]] += 1.0;
  }
  for (int l = 1; l <= l_max; ++l) frac[l] = frac[l - 1] + frac[l];
  for (int l = 0; l <= l_max; ++l) frac[l] /= static_cast<double>(g.n);

  std::set<double> grid;
  for (int l = 3; l <= l_max; ++l) {
    grid.insert(1.0 / static_cast<double>(l));
    if (frac[l] > 0.0) grid.insert(frac[l]);
  }
  double omega = 1.0;
  for (double eps : grid) {
    if (eps * static_cast<double>(l_max) < 1.0) continue;  // floor(1/eps) not observable
    const int l = std::min(l_max, static_cast<int>(1.0 / eps));
    if (frac[l] <= eps) {
      omega = std::min(omega, eps);
      break;  // grid is sorted ascending; first feasible value is minimal
    }
  }
  return omega;
}

void save_edge_list(const RegularGraph& g, std::ostream& out) {
  out << g.n << ' ' << g.d << '\n';
  for (int u = 0; u < g.n; ++u)
    for (int v : g.adj[u])
      if (u < v) out << u << ' ' << v << '\n';
}

RegularGraph load_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("edge list: missing header line");
  std::istringstream header(line);
  RegularGraph g;
  if (!(header >> g.n >> g.d) || g.n <= 0 || g.d <= 0)
    throw std::runtime_error("edge list: malformed header '" + line + "'");
  g.adj.assign(g.n, {});
  std::set<std::pair<int, int>> seen;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    int u, v;
    std::string extra;
    if (!(ls >> u >> v) || (ls >> extra))
      throw std::runtime_error("edge list line " + std::to_string(lineno) +
                               ": malformed '" + line + "'");
    if (u < 0 || v < 0 || u >= g.n || v >= g.n || u >= v)
      throw std::runtime_error("edge list line " + std::to_string(lineno) +
                               ": vertices must satisfy 0 <= u < v < n");
    if (!seen.insert({u, v}).second)
      throw std::runtime_error("edge list line " + std::to_string(lineno) +
                               ": duplicate edge");
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  }
  for (int v = 0; v < g.n; ++v) {
    if (static_cast<int>(g.adj[v].size()) != g.d)
      throw std::runtime_error("edge list: vertex " + std::to_string(v) +
                               " has degree " + std::to_string(g.adj[v].size()) +
                               ", expected " + std::to_string(g.d));
    std::sort(g.adj[v].begin(), g.adj[v].end());
  }
  return g;
}

}  // namespace wavecheck
