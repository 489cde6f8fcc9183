#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gmlm/ising.hpp"
#include "gmlm/numerics.hpp"
#include "gmlm/rng.hpp"

namespace gmlm {

using WideConfig = std::uint64_t;

inline int wide_spin(WideConfig x, int i) { return (x >> i) & 1u ? +1 : -1; }

// Clique model past the exact-enumeration cap: up to 64 sites, one clique
// with a uniform coupling and one shared field value on its members,
// independent fields elsewhere, no other edges. Block conditionals factor
// through the clique magnetization, so a step costs O(n) work regardless of
// the block size.
struct CliqueSystem {
  int n = 0;
  std::vector<int> clique;     // ascending
  WideConfig cmask = 0;
  double coupling = 0.0;
  double clique_field = 0.0;
  std::vector<double> fields;  // size n; clique entries equal clique_field

  void validate() const;
  int clique_size() const { return static_cast<int>(clique.size()); }
  CliqueScales scales() const;
};

CliqueSystem make_clique_system(int n, std::vector<int> clique, double coupling,
                                std::vector<double> fields);

// Unnormalized log weight, exact: the clique pair sum collapses to
// (t^2 - c) / 2 with t the clique magnetization.
double wide_log_weight(const CliqueSystem& sys, WideConfig x);

// One k-Gibbs transition: uniform size-k block, then the exact conditional
// sampled through the clique-magnetization classes (class, then a uniform
// subset of that size, then the independent outside sites).
WideConfig clique_kgibbs_step(const CliqueSystem& sys, WideConfig x, int k, RngStream& rng);

// Every site redrawn at once from its single-site conditional at the current
// state.
WideConfig clique_independent_parallel_step(const CliqueSystem& sys, WideConfig x,
                                            RngStream& rng);

// Exact conditional over the 2^|block| completions (little-endian over
// ascending block members), assembled from the same class factorization the
// sampler uses. Capacity |block| <= 13; exists to be compared against the
// generic enumeration path.
FiniteDistribution clique_block_conditional(const CliqueSystem& sys, WideConfig x,
                                            WideConfig block);

bool clique_in_mode(const CliqueSystem& sys, int sign, WideConfig x);

struct WideHittingTrials {
  int trials = 0;
  int hits = 0;
  std::vector<int> hit_step;  // step of first entry, -1 if never
};

// First-entry trials; trial t consumes the derived stream root.derive(t).
// k_gibbs false runs the independent-parallel update (k ignored).
WideHittingTrials clique_hitting_trials(const CliqueSystem& sys, bool k_gibbs, int k,
                                        WideConfig start,
                                        const std::function<bool(WideConfig)>& target,
                                        int steps, int trials, const RngStream& root);

}  // namespace gmlm
