#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmlm/ising.hpp"
#include "gmlm/numerics.hpp"
#include "gmlm/rng.hpp"

namespace gmlm {

enum class MaskKind { UniformK, Weighted, Adaptive };

// Law of the resampled block K. UniformK draws a uniformly random size-k
// subset; Weighted draws from a fixed block list; Adaptive draws from a
// per-configuration table, which makes the conditional itself configuration-
// dependent (see adaptive_conditional).
struct MaskDistribution {
  MaskKind kind = MaskKind::UniformK;
  int n = 0;
  int k = 0;                          // UniformK
  std::vector<std::uint32_t> blocks;  // Weighted / Adaptive
  std::vector<double> probs;          // Weighted
  std::vector<std::vector<double>> table;  // Adaptive: [config][block index]

  static MaskDistribution uniform_k(int n, int k);
  static MaskDistribution weighted(int n, std::vector<std::uint32_t> blocks,
                                   std::vector<double> probs);
  static MaskDistribution adaptive(int n, std::vector<std::uint32_t> blocks,
                                   std::vector<std::vector<double>> table);

  void validate() const;
  int block_index(std::uint32_t block) const;  // -1 if absent
  // P(K = block | X = x); for UniformK this is 1/C(n,k) for size-k blocks.
  double block_prob(std::uint32_t block, SpinConfig x) const;

  std::string to_json() const;
  static MaskDistribution from_json(int expected_n, const std::string& text);
};

// Uniform size-k draws are Fisher-Yates prefixes, so for one stream the
// size-k mask is always a subset of the size-(k+1) mask.
std::uint32_t sample_mask(const MaskDistribution& d, RngStream& rng, SpinConfig x);

// One row per (sequence, mask) pair.
struct MaskedDataset {
  int n = 0;
  std::vector<int> seq_index;
  std::vector<SpinConfig> configs;
  std::vector<std::uint32_t> masks;

  std::size_t rows() const { return configs.size(); }
  void validate() const;
  std::string to_csv() const;
  static MaskedDataset from_csv(int n, const std::string& text);
};

// Aggregated (config, mask) pairs with weights summing to 1; evaluation cost
// depends on distinct pairs, not raw rows. Keys are sorted so accumulation
// order is deterministic.
struct PairWeights {
  int n = 0;
  std::vector<SpinConfig> configs;
  std::vector<std::uint32_t> masks;
  std::vector<double> weights;
};

PairWeights aggregate_pairs(const MaskedDataset& data);
// Exact average over all C(n,k) masks per observed configuration
// (mask-noise-free objective). Refused when C(n,k) > 4096.
PairWeights population_pairs(const std::vector<SpinConfig>& configs, int n, int k);

// Modified conditional for adaptive masking: distribution of the completions
// of `completion_set` given the rest of x, with the mask weight evaluated at
// block `mask_block` on each completed configuration:
//   p(a) ∝ joint(a ∪ x_rest) * P(K = mask_block | a ∪ x_rest).
FiniteDistribution adaptive_completion_dist(const FiniteDistribution& joint,
                                            const MaskDistribution& d, SpinConfig x,
                                            std::uint32_t completion_set,
                                            std::uint32_t mask_block);
// The displayed form: resampled coordinates are the mask block itself.
FiniteDistribution adaptive_conditional(const FiniteDistribution& joint,
                                        const MaskDistribution& d, SpinConfig x,
                                        std::uint32_t block);
// Observed-block reading: condition on x restricted to `block` and on K=block,
// predict the complement.
FiniteDistribution adaptive_conditional_observed(const FiniteDistribution& joint,
                                                 const MaskDistribution& d, SpinConfig x,
                                                 std::uint32_t block);

// max over (x, K in blocks) of | p(x_K | x_rest) - sum_{K'} P(K'|x_rest) *
// p_adaptive(x_K | x_rest, K') |; zero (to numerical precision) for any joint
// and any mask table.
double marginalization_identity_check(const FiniteDistribution& joint,
                                      const MaskDistribution& d);

// The conditional the masked objective scores: plain block_conditional for
// UniformK and Weighted laws, the modified conditional (model weight times
// mask weight, renormalized) for adaptive laws. Log-space, so safe at
// couplings where raw weights overflow.
FiniteDistribution masked_conditional(const IsingModel& m, const MaskDistribution& d,
                                      SpinConfig x, std::uint32_t block);

struct FitOptions {
  double step = 0.1;
  int max_iters = 50000;
  // Loss values near 1 resolve differences of ~2e-16, which floors the
  // reachable gradient norm around 2e-8; the default stays above that floor.
  double grad_tol = 1e-7;
  int max_halvings = 30;
};

struct FitResult {
  std::vector<double> theta;
  double loss = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;

  std::string to_json() const;
};

// Masked-conditional objective: mean over weighted (config, mask) pairs of
// -log p_theta(x_K | x_rest) (adaptive laws use the modified conditional).
// The d argument supplies the mask-law kind and, for adaptive laws, the
// table; recorded masks come from the data.
double mple_loss(const std::vector<double>& theta, const PairWeights& pw,
                 const MaskDistribution& d);
std::vector<double> mple_gradient(const std::vector<double>& theta, const PairWeights& pw,
                                  const MaskDistribution& d);
SymMatrix loss_hessian(const std::vector<double>& theta, const PairWeights& pw,
                       const MaskDistribution& d);

double mple_loss(const std::vector<double>& theta, const MaskedDataset& data,
                 const MaskDistribution& d);
std::vector<double> mple_gradient(const std::vector<double>& theta, const MaskedDataset& data,
                                  const MaskDistribution& d);
SymMatrix loss_hessian(const std::vector<double>& theta, const MaskedDataset& data,
                       const MaskDistribution& d);

// Full-batch damped Newton from zero: the step solves the exact curvature
// system through its eigendecomposition (small eigenvalues floored), with an
// Armijo backtracking line search and a plain gradient-descent fallback at
// `step` if the Newton step is rejected. The objective is convex, so descent
// directions always exist and the iteration is globally convergent.
FitResult fit_mple(const PairWeights& pw, const MaskDistribution& d, const FitOptions& opts);
FitResult fit_mple(const MaskedDataset& data, const MaskDistribution& d, const FitOptions& opts);

}  // namespace gmlm
