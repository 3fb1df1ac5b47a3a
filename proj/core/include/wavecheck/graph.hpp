#pragma once

#include <iosfwd>
#include <vector>

#include "wavecheck/rng.hpp"

namespace wavecheck {

// Simple d-regular graph, 0-indexed, sorted adjacency lists.
struct RegularGraph {
  int n = 0;
  int d = 0;
  std::vector<std::vector<int>> adj;

  long long edge_count() const { return static_cast<long long>(n) * d / 2; }
};

// Uniform random simple d-regular graph by the pairing model: a random
// perfect matching on n*d half-edges, rejected and redrawn whole whenever it
// produces a loop or a multi-edge.  n*d must be even, d >= 3, n > d.
// Throws std::runtime_error after max_attempts rejected pairings.
RegularGraph random_regular(int n, int d, Rng& rng, int max_attempts = 10000);

bool is_connected(const RegularGraph& g);

// Smallest cycle length through each vertex, capped: values > l_max are
// reported as l_max + 1.
std::vector<int> cycle_length_through(const RegularGraph& g, int l_max);

// Essential-girth functional: smallest epsilon on the grid
// {1/L : 3 <= L <= l_max} united with the observed cycle fractions such that
// at least a (1 - epsilon) fraction of vertices lies on no cycle of length
// <= floor(1/epsilon).  Cycles longer than l_max are invisible, so the
// result is an upper-bound estimate.
double essential_girth_omega(const RegularGraph& g, int l_max = 20);

// Edge list format: first line "n d", one "u v" line per edge with u < v.
void save_edge_list(const RegularGraph& g, std::ostream& out);
RegularGraph load_edge_list(std::istream& in);

}  // namespace wavecheck
