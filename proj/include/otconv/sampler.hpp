#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "measure.hpp"
#include "transport.hpp"

namespace otconv {

inline constexpr std::uint64_t kDefaultSeed = 0x075bcd15u;  // 123456789

/// splitmix64 step; also used to derive independent per-sample seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t state = base ^ (0x9e3779b97f4a7c15ull * (index + 1));
  return splitmix64(state);
}

/// Deterministic uniform generator; identical output on every platform, so
/// fixed seeds give byte-identical reports.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i)
      std::swap(perm[i - 1], perm[next_u64() % i]);
    return perm;
  }

 private:
  std::uint64_t state_;
};

/// Random instance generation used by the equivalence suite and the tests.
struct SamplerConfig {
  int min_atoms = 2;
  int max_atoms = 5;
  int min_dim = 1;
  int max_dim = 3;
  double coord_range = 1.0;  // coordinates uniform in [-coord_range, coord_range]
  std::uint64_t seed = kDefaultSeed;
  bool include_paper_pair = false;  // inject the known tent-kernel crossing violation
  double pair_eps = 1.0;
};

/// Measure with n atoms in dimension d; weights are normalized uniforms, or
/// exactly 1/n when uniform_weights is set.
inline DiscreteMeasure random_measure(SampleRng& rng, int n_atoms, int dim,
                                      double coord_range = 1.0,
                                      bool uniform_weights = false) {
  std::vector<Point> points(static_cast<std::size_t>(n_atoms));
  std::vector<double> weights(static_cast<std::size_t>(n_atoms));
  for (auto& p : points) {
    p.resize(static_cast<std::size_t>(dim));
    for (double& c : p) c = rng.uniform(-coord_range, coord_range);
  }
  if (uniform_weights) {
    std::fill(weights.begin(), weights.end(), 1.0 / n_atoms);
  } else {
    double total = 0.0;
    for (double& w : weights) {
      w = rng.uniform();
      total += w;
    }
    for (double& w : weights) w /= total;
  }
  return DiscreteMeasure(std::move(points), std::move(weights));
}

/// Feasible, generically non-optimal plan: northwest-corner fill over randomly
/// permuted atom orders.
inline TransportPlan random_feasible_plan(SampleRng& rng, const DiscreteMeasure& mu,
                                          const DiscreteMeasure& nu) {
  const std::vector<std::size_t> rows = rng.permutation(mu.size());
  const std::vector<std::size_t> cols = rng.permutation(nu.size());
  std::vector<double> a(mu.size()), b(nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) a[i] = mu.weight(rows[i]);
  for (std::size_t j = 0; j < nu.size(); ++j) b[j] = nu.weight(cols[j]);

  std::vector<PlanEntry> entries;
  std::size_t i = 0, j = 0;
  while (true) {
    const double q = std::min(a[i], b[j]);
    if (q > kMassFloor) entries.push_back({rows[i], cols[j], q});
    a[i] -= q;
    b[j] -= q;
    if (i + 1 == a.size() && j + 1 == b.size()) break;
    if (a[i] <= b[j]) {
      if (i + 1 < a.size()) ++i;
      else ++j;
    } else {
      if (j + 1 < b.size()) ++j;
      else ++i;
    }
  }
  return TransportPlan(mu, nu, std::move(entries));
}

}  // namespace otconv
