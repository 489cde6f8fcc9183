#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gmlm/bits.hpp"
#include "gmlm/numerics.hpp"
#include "gmlm/rng.hpp"

namespace gmlm {

// Inputs for the planted-clique construction: pairwise coupling `coupling` on
// every pair inside `clique`, per-site fields, no other edges.
struct CliqueParams {
  int n = 0;
  std::vector<int> clique;
  double coupling = 0.0;
  std::vector<double> fields;

  void validate(int max_n) const;
};

struct CliqueSpec {
  std::vector<int> members;  // ascending
  double coupling = 0.0;
};

// Pairwise binary model over spins in {-1,+1}^n with weight
// exp(sum_i h_i x_i + sum_{edges} J_ij x_i x_j), each unordered pair at most
// once. n is capped at 20: every downstream exact operation enumerates 2^n.
struct IsingModel {
  int n = 0;
  std::vector<double> h;
  struct Edge {
    int i, j;  // i < j
    double j_val;
  };
  std::vector<Edge> edges;
  std::optional<CliqueSpec> clique;

  void validate() const;
  std::uint32_t clique_mask() const;
};

// Canonical parameter vector: n fields then couplings for pairs
// (0,1), (0,2), ..., (n-2,n-1). Every model embeds into the full vector;
// absent edges are zero couplings.
int theta_dim(int n);
int pair_index(int n, int i, int j);
std::vector<double> theta_from_model(const IsingModel& m);
IsingModel model_from_theta(int n, const std::vector<double>& theta);

// phi(x): the sufficient statistics (x_i) then (x_i x_j), matching the theta
// layout.
void fill_phi(int n, SpinConfig x, std::vector<double>& phi);

IsingModel build_clique_ising(const CliqueParams& p);

double log_weight(const IsingModel& m, SpinConfig x);
double partition_function_log(const IsingModel& m);
FiniteDistribution joint_table(const IsingModel& m);

// Conditional law of the block's spins given the rest, as a distribution over
// the 2^|block| completions (little-endian over ascending block members).
FiniteDistribution block_conditional(const IsingModel& m, SpinConfig x, std::uint32_t block);

// P(x_i = +1 | x_{-i}) = sigmoid(2 (h_i + sum_j J_ij x_j)).
double single_site_conditional(const IsingModel& m, SpinConfig x, int i);

// Inverse-CDF sampler over the exact joint; the CDF is built once.
class ExactSampler {
 public:
  explicit ExactSampler(const IsingModel& m);
  SpinConfig draw(RngStream& rng) const;

 private:
  std::vector<double> cdf_;
};

std::vector<SpinConfig> exact_sample(const IsingModel& m, RngStream& rng, int count);

// Configurations whose clique spins all equal `sign` (+1 or -1).
std::vector<SpinConfig> mode_region(const IsingModel& m, int sign);
bool in_mode(std::uint32_t cmask, int sign, SpinConfig x);

// Scale quantities of a clique model. Requires the edges to be exactly the
// clique pairs with one uniform coupling; the mode statements are phrased in
// these scales. cmask is only meaningful when n <= 32; wide systems carry
// their own 64-bit mask and leave it zero.
struct CliqueScales {
  int n = 0;              // total sites
  std::uint32_t cmask = 0;
  int c = 0;              // clique size
  double coupling = 0.0;
  double h_g = 0.0;       // sum of clique fields
  double h_out = 0.0;     // sum of |h_i| outside the clique
  double h_l1 = 0.0;      // full l1 norm of the fields
  double j0 = 0.0;        // coupling - h_l1
};

CliqueScales clique_scales(const IsingModel& m);

struct Inequality {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

struct AssumptionReport {
  std::string assumption;
  bool holds = false;
  std::vector<Inequality> checks;
  std::map<std::string, double> values;
};

// Ferromagnetic premise: clique field sum dominates outside fields in
// absolute value, and the coupling exceeds ||h||_1 with positive margin j0.
AssumptionReport check_strongly_ferromagnetic(const CliqueScales& v);
AssumptionReport check_strongly_ferromagnetic(const IsingModel& m);
// Scale premises for the mode theorems, at escape budget M and failure
// probability delta.
AssumptionReport check_strong_interactions(const CliqueScales& v, int big_m, double delta);
AssumptionReport check_strong_interactions(const IsingModel& m, int big_m, double delta);
// Block-size premise: k >= max(clique size, N - delta(N+1)/((4-delta)|C|+delta)).
AssumptionReport check_large_k(int n, int clique_size, int k, double delta);

struct ModeOrderingReport {
  bool ordered = false;
  // min over R_{+1} of log p minus max over R_{-1}; positive iff every
  // all-plus state beats every all-minus state.
  double margin_plus_over_minus = 0.0;
  // min over R_{-1} of log p minus (2 j0 + max over non-mode states).
  double margin_minus_over_rest = 0.0;
  // max over R_{+1} of | log p(x) - log p(flip_clique(x)) - 2 h_g |.
  double bijection_max_dev = 0.0;
  double h_g = 0.0;
  double j0 = 0.0;
};

ModeOrderingReport verify_mode_ordering(const IsingModel& m);

// Model file round-trip: {"n", "h", "J": [[i,j,value],...]} plus
// {"clique", "J_clique"} when clique structure is present.
std::string model_to_json(const IsingModel& m);
IsingModel model_from_json(const std::string& text);

}  // namespace gmlm
