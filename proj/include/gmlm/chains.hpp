#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "gmlm/ising.hpp"
#include "gmlm/masking.hpp"
#include "gmlm/numerics.hpp"
#include "gmlm/rng.hpp"

namespace gmlm {

enum class ChainKind { KGibbs, IndependentParallel, WeightedBlock, AdaptiveBlock };

struct ChainSpec {
  ChainKind kind = ChainKind::KGibbs;
  int k = 1;              // KGibbs block size
  MaskDistribution mask;  // WeightedBlock / AdaptiveBlock law

  static ChainSpec k_gibbs(int k);
  static ChainSpec independent_parallel();
  static ChainSpec weighted_block(MaskDistribution d);
  static ChainSpec adaptive_block(MaskDistribution d);
};

// One transition. k-Gibbs draws a uniform size-k block and resamples it from
// the exact conditional (stationary law: the model joint). Independent-
// parallel redraws every site from its single-site conditional computed at
// the current state; its stationary law is NOT the joint in general. Block
// chains draw a block from the mask law and resample it from the conditional
// the masked objective scores.
SpinConfig chain_step(const IsingModel& m, const ChainSpec& spec, SpinConfig x, RngStream& rng);

// Exact one-step matrix, row = source state, rows sum to 1. For config
// chains, state i is configuration i and pi is the model joint. For the
// adaptive pair chain, states are the (config, block) pairs of positive mask
// probability and pi(x, K) = p(x) P(K | x).
struct ChainMatrix {
  std::size_t nstates = 0;
  std::vector<double> p;   // nstates * nstates
  std::vector<double> pi;
  std::vector<std::pair<SpinConfig, int>> pair_states;  // empty for config chains

  double at(std::size_t from, std::size_t to) const { return p[from * nstates + to]; }
};

// Config-space matrix. Adaptive chains appear in collapsed form: the block is
// redrawn from the mask law at every step, which keeps the chain reversible
// with respect to the joint. Capacity: 2^n <= 8192.
ChainMatrix transition_matrix(const IsingModel& m, const ChainSpec& spec);

// Adaptive chain on (config, block) states, holding the block fixed during a
// transition. Every (rest, block) class is closed, so the chain is reducible
// and its Poincare constant is infinite; it exists to study the Dirichlet
// form, which matches the collapsed chain's on functions of the config alone.
ChainMatrix adaptive_pair_matrix(const IsingModel& m, const MaskDistribution& d);

// E(f, g) = (1/2) sum_{x,y} pi_x P_xy (f_x - f_y)(g_x - g_y).
double dirichlet_form(const ChainMatrix& cm, const std::vector<double>& f,
                      const std::vector<double>& g);
// <f, (I - P) g>_pi; equals the Dirichlet form exactly when P is reversible.
double dirichlet_inner(const ChainMatrix& cm, const std::vector<double>& f,
                       const std::vector<double>& g);
double pi_mean(const ChainMatrix& cm, const std::vector<double>& f);
double pi_variance(const ChainMatrix& cm, const std::vector<double>& f);

struct PoincareResult {
  double c = 0.0;        // 1 / (1 - lambda2); +inf when the spectral gap closes
  double lambda2 = 0.0;  // second-largest eigenvalue of the symmetrized kernel
  bool infinite = false;
  double reversibility_residual = 0.0;  // relative ||DP - P^T D||_F
};

// Best constant in Var_pi(f) <= C E(f, f). Requires reversibility (residual
// <= 1e-8); the spectrum comes from D^{1/2} P D^{-1/2} via Jacobi.
PoincareResult poincare_constant(const ChainMatrix& cm);

// One-step chance for the k-Gibbs chain of NOT landing in the all-plus mode
// region, bounded uniformly over states; after T steps the hitting
// probability is at least 1 - c^T from any start. Equals 1 (vacuous) when
// k < clique size.
double mode_fast_constant(const CliqueScales& v, int k);
double mode_fast_constant(const IsingModel& m, int k);

struct ModeSlowConstants {
  double c_stuck = 0.0;    // per-step escape probability <= exp(-c_stuck)
  long long t_bound = 0;   // floor((delta/2) exp(c_stuck))
  double escape_prob_bound = 0.0;  // t_bound * exp(-c_stuck) <= delta/2
};

// Anti-concentration of the clique magnetization under any single-site or
// independent update at low temperature: leaving the all-plus region within
// t_bound steps has probability at most delta/2.
ModeSlowConstants mode_slow_constants(const CliqueScales& v, double delta);
ModeSlowConstants mode_slow_constants(const IsingModel& m, double delta);

// u_T(x) = P(enter target within T steps | start at x), exact for every
// start, counting X_0 through X_T. Absorbing recursion u_{t+1} = 1 on the
// target and P u_t elsewhere.
std::vector<double> hitting_probability_exact(const ChainMatrix& cm,
                                              const std::vector<std::uint8_t>& target,
                                              int steps);

struct HittingTrials {
  int trials = 0;
  int hits = 0;
  std::vector<int> hit_step;  // step of first entry, -1 if never (start counts as step 0)
};

// Simulated first-entry times. Trial t consumes the derived stream
// root.derive(t), so results do not depend on execution order.
HittingTrials run_hitting_trials(const IsingModel& m, const ChainSpec& spec, SpinConfig start,
                                 const std::function<bool(SpinConfig)>& target, int steps,
                                 int trials, const RngStream& root);

}  // namespace gmlm
