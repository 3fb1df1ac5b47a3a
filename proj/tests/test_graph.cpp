#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "wavecheck/graph.hpp"
#include "wavecheck/rng.hpp"

using namespace wavecheck;

namespace {

RegularGraph complete_graph(int n) {
  RegularGraph g;
  g.n = n;
  g.d = n - 1;
  g.adj.resize(n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u != v) g.adj[u].push_back(v);
    }
  }
  return g;
}

}  // namespace

TEST_CASE("generator produces simple connected regular graphs") {
  for (int d : {3, 4}) {
    Rng rng(7 + d);
    const RegularGraph g = random_regular(500, d, rng);
    CHECK(g.n == 500);
    CHECK(g.d == d);
    CHECK(g.edge_count() == 500LL * d / 2);
    for (int u = 0; u < g.n; ++u) {
      REQUIRE(static_cast<int>(g.adj[u].size()) == d);
      std::set<int> nb(g.adj[u].begin(), g.adj[u].end());
      CHECK(static_cast<int>(nb.size()) == d);  // no multi-edges
      CHECK(nb.count(u) == 0);                  // no loops
      for (int v : g.adj[u]) {
        const auto& back = g.adj[v];
        CHECK(std::find(back.begin(), back.end(), u) != back.end());
      }
    }
    CHECK(is_connected(g));
  }
}

TEST_CASE("generator is deterministic in the seed") {
  Rng a(99), b(99), c(100);
  const RegularGraph ga = random_regular(200, 3, a);
  const RegularGraph gb = random_regular(200, 3, b);
  const RegularGraph gc = random_regular(200, 3, c);
  CHECK(ga.adj == gb.adj);
  CHECK(ga.adj != gc.adj);
}

TEST_CASE("generator rejects impossible degree sequences") {
  Rng rng(1);
  CHECK_THROWS_AS(random_regular(5, 3, rng), std::invalid_argument);  // odd nd
  CHECK_THROWS_AS(random_regular(3, 3, rng), std::invalid_argument);  // d >= n
}

TEST_CASE("edge list round-trips through save and load") {
  Rng rng(3);
  const RegularGraph g = random_regular(128, 3, rng);
  std::ostringstream out;
  save_edge_list(g, out);
  const std::string text = out.str();

  // header is "n d", edges are "u v" with u < v
  std::istringstream header(text);
  int n = 0, d = 0;
  header >> n >> d;
  CHECK(n == g.n);
  CHECK(d == g.d);
  int u, v;
  long long lines = 0;
  while (header >> u >> v) {
    CHECK(u < v);
    CHECK(v < g.n);
    ++lines;
  }
  CHECK(lines == g.edge_count());

  std::istringstream in(text);
  const RegularGraph back = load_edge_list(in);
  CHECK(back.n == g.n);
  CHECK(back.d == g.d);
  CHECK(back.adj == g.adj);
}

TEST_CASE("loader rejects malformed and inconsistent input") {
  std::istringstream missing("4\n0 1\n");
  CHECK_THROWS_AS(load_edge_list(missing), std::runtime_error);
  std::istringstream range("4 3\n0 9\n");
  CHECK_THROWS_AS(load_edge_list(range), std::runtime_error);
  std::istringstream degree("4 3\n0 1\n");  // not 3-regular
  CHECK_THROWS_AS(load_edge_list(degree), std::runtime_error);
  std::istringstream swapped("4 3\n1 0\n");  // u < v required
  CHECK_THROWS_AS(load_edge_list(swapped), std::runtime_error);
}

TEST_CASE("cycle search sees the triangles of the complete graph") {
  const RegularGraph k4 = complete_graph(4);
  const std::vector<int> cyc = cycle_length_through(k4, 6);
  REQUIRE(static_cast<int>(cyc.size()) == 4);
  for (int c : cyc) CHECK(c == 3);
  CHECK(essential_girth_omega(k4) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("random regular graphs have few vertices on short cycles") {
  // fraction of vertices on cycles of at most logarithmic length
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const RegularGraph g = random_regular(10000, 3, rng);
    if (essential_girth_omega(g) <= 0.12) ++ok;
  }
  CHECK(ok >= 9);
}
