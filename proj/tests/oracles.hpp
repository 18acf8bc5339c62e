#pragma once

// Independent oracles used by the tests. These deliberately avoid the
// library's solver path: assignment costs are minimized by exhaustive
// permutation search.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include <otconv/measure.hpp>

namespace oracles {

/// Minimal quadratic transport cost between two uniform measures with the
/// same number of atoms, by brute force over all n! assignments.
inline double brute_force_uniform_cost(const otconv::DiscreteMeasure& mu,
                                       const otconv::DiscreteMeasure& nu) {
  const std::size_t n = mu.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      cost += otconv::squared_distance(mu.atom(i), nu.atom(perm[i])) / n;
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace oracles
