#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmlm/ising.hpp"
#include "gmlm/masking.hpp"
#include "gmlm/rng.hpp"

namespace gmlm {

struct CheckOutcome {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckOutcome> checks;
  bool all_ok = true;

  void add(const std::string& name, bool ok, const std::string& detail);
};

struct VerifyOptions {
  int count = 5;  // random instances per suite
  std::uint64_t seed = 1;
};

// Random instances for the self-check suites. Dense pair graph; fields and
// couplings uniform in the given symmetric ranges.
IsingModel random_model(RngStream& rng, int n, double field_scale, double coupling_scale);
// All blocks of one random size, sometimes joined with the next size up,
// carrying random positive probabilities.
MaskDistribution random_weighted_law(RngStream& rng, int n);
// Same block scheme with an everywhere-positive configuration-dependent
// table, so every (configuration, block) pair has positive mass.
MaskDistribution random_adaptive_law(RngStream& rng, int n);
// Planted-clique instance satisfying the ferromagnetic premise: positive
// clique fields dominating the outside fields, coupling = ||h||_1 + margin
// with the margin large enough that tanh(j0) * c / 2 > 1.
IsingModel random_clique_model(RngStream& rng, int n_min, int n_max);

// Each suite aggregates one named property over `count` random instances and
// reports the worst deviation observed.
SuiteResult verify_conditionals(const VerifyOptions& opt);
SuiteResult verify_convexity(const VerifyOptions& opt);
SuiteResult verify_information_equality(const VerifyOptions& opt);
SuiteResult verify_monotonicity(const VerifyOptions& opt);
SuiteResult verify_dirichlet(const VerifyOptions& opt);
SuiteResult verify_variance_bound(const VerifyOptions& opt);
SuiteResult verify_modes(const VerifyOptions& opt);
SuiteResult verify_hitting(const VerifyOptions& opt);

const std::vector<std::string>& suite_names();
// Runs the named suites in canonical order; "all" expands to every suite.
std::vector<SuiteResult> run_suites(const std::vector<std::string>& names,
                                    const VerifyOptions& opt);

}  // namespace gmlm
