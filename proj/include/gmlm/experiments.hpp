#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gmlm/chains.hpp"
#include "gmlm/clique_system.hpp"
#include "gmlm/ising.hpp"
#include "gmlm/masking.hpp"

namespace gmlm {

// Runs `count` independent tasks on up to `jobs` threads. Every task must
// write only into its own preallocated slot and draw randomness only from
// streams derived from its own index, so the output is identical for every
// thread count. Rethrows the first task exception.
void parallel_for(int jobs, std::size_t count, const std::function<void(std::size_t)>& task);

// requested > 0 wins; otherwise the GMLM_LAB_JOBS environment variable;
// otherwise the hardware count (capped at 16, at least 1).
int resolve_jobs(int requested);

// ---- estimation error against sample size ----------------------------------

struct RecoveryConfig {
  IsingModel model;
  std::vector<int> ks;            // uniform mask sizes, strictly increasing
  std::vector<int> sample_sizes;  // strictly increasing
  int trials = 10;
  int masks_per_sequence = 1;
  // Replace recorded masks by the exact average over all C(n,k) masks.
  bool population_masks = false;
  std::uint64_t seed = 1;
  FitOptions fit;
};

struct RecoveryCell {
  int trial = 0;
  int k = 0;
  int sample_size = 0;
  double err = 0.0;        // l2 distance to the data-generating parameters
  double scaled_sq = 0.0;  // sample_size * err^2; estimates the covariance trace
  int iterations = 0;
  bool converged = false;
};

struct RecoveryResult {
  std::uint64_t seed = 0;
  std::vector<RecoveryCell> cells;  // ordered by (trial, sample_size, k)
};

// Configurations are shared across k within a (trial, sample size) cell and
// the size-k mask of a row is nested inside its size-(k+1) mask, so per-k
// errors are paired comparisons.
RecoveryResult run_recovery(const RecoveryConfig& cfg, int jobs);
std::string recovery_csv(const RecoveryConfig& cfg, const RecoveryResult& r);

// Mean over trials of sample_size * err^2 for one (k, sample_size).
double recovery_mean_scaled_sq(const RecoveryResult& r, int k, int sample_size);

// ---- normality of the rescaled error ---------------------------------------

struct NormalityConfig {
  IsingModel model;
  int k = 1;
  int replicas = 200;
  int sample_size = 20000;
  std::uint64_t seed = 1;
  FitOptions fit;
};

struct NormalityResult {
  double empirical_trace = 0.0;  // trace of Cov of sqrt(N) (theta_hat - theta*)
  double gamma_trace = 0.0;      // trace of the asymptotic covariance
  double ratio = 0.0;
  int converged_replicas = 0;
};

NormalityResult run_normality(const NormalityConfig& cfg, int jobs);

// ---- staying inside the planted mode ---------------------------------------

struct ModeEscapeConfig {
  CliqueParams params;
  double delta = 0.5;
  int trials = 200;
  int steps = 0;  // 0 means: use the theoretical step bound t_bound
  std::uint64_t seed = 1;
};

struct ModeEscapeResult {
  ModeSlowConstants constants;
  int steps = 0;
  int trials = 0;
  int escapes = 0;  // trials whose independent-parallel run left the mode
  double escape_fraction = 0.0;
};

// Starts every trial at the all-plus configuration and runs the
// independent-parallel update; an escape is the first state whose clique
// spins are not all plus.
ModeEscapeResult run_mode_escape(const ModeEscapeConfig& cfg, int jobs);

// ---- sampler separation at scale -------------------------------------------

struct SeparationConfig {
  double delta = 0.25;
  int big_m = 5;
  int trials = 500;
  int fast_steps = 5;
  int slow_steps = 1000;  // must stay below the slow chain's step bound
  std::uint64_t seed = 1;
};

struct SeparationResult {
  int n = 0, clique_size = 0, k = 0;
  double h_g = 0.0, j0 = 0.0, coupling = 0.0;
  double c_fast = 0.0;
  ModeSlowConstants slow;
  AssumptionReport premises;    // interaction-strength premises
  AssumptionReport block_size;  // block-size premise for the chosen k
  int trials = 0;
  int fast_hits = 0;      // k-Gibbs runs reaching the all-plus mode
  int slow_escapes = 0;   // independent-parallel runs leaving it
  double fast_bound = 0.0;  // 1 - c_fast^fast_steps
  double slow_bound = 0.0;  // delta / 2
};

// Builds the smallest instance satisfying every premise at (delta, big_m):
// clique size c = ceil(8 (1 + ln(4 M / delta))), clique field sum
// (1/2) ln(2 (4 - delta) / delta) spread uniformly, coupling margin
// j0 = (c/2) ln 2, four free outside sites, and the block size forced by the
// block-size premise.
SeparationResult run_separation(const SeparationConfig& cfg, int jobs);

// ---- mode recovery across samplers -----------------------------------------

struct SamplingFigureConfig {
  int n = 10;
  std::vector<int> clique = {0, 1, 2, 3};
  double field = 5.0;  // on clique members; outside fields are zero
  std::vector<double> couplings = {1, 2, 5, 10, 20, 40};
  std::vector<int> ks = {4, 7, 10};
  bool include_independent = true;
  int budget = 1000;
  int trials = 10;
  std::uint64_t seed = 1;
};

struct SamplingCell {
  double coupling = 0.0;
  std::string chain;  // "kgibbs<k>" or "independent"
  int trial = 0;
  int hit_step = 0;  // first step inside the all-plus mode, -1 if never
};

struct SamplingFigureResult {
  std::uint64_t seed = 0;
  std::vector<SamplingCell> cells;  // ordered by (coupling, chain, trial)
};

// Every run starts at the all-minus configuration.
SamplingFigureResult run_sampling_figure(const SamplingFigureConfig& cfg, int jobs);
std::string sampling_csv(const SamplingFigureConfig& cfg, const SamplingFigureResult& r);

struct SamplingAggregate {
  double coupling = 0.0;
  std::string chain;
  int hits = 0;
  int trials = 0;
  double median_hit_step = 0.0;  // over hitting trials only; +inf if none hit
};

std::vector<SamplingAggregate> sampling_aggregate(const SamplingFigureConfig& cfg,
                                                  const SamplingFigureResult& r);

}  // namespace gmlm
