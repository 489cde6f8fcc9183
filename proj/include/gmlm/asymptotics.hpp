#pragma once

#include <vector>

#include "gmlm/ising.hpp"
#include "gmlm/masking.hpp"
#include "gmlm/numerics.hpp"

namespace gmlm {

// Exact (config, block) weights under the model joint and the mask law:
// w(x, K) = p(x) P(K = K | X = x). Feeding these into the masked objective
// gives population quantities instead of sample averages.
PairWeights population_pair_weights(const IsingModel& m, const MaskDistribution& d);

// Population curvature at theta: E_{X,K}[ Cov(phi | X_rest, K) ] with the
// conditional taken under theta and the outer law under m.
SymMatrix population_hessian(const IsingModel& m, const MaskDistribution& d,
                             const std::vector<double>& theta);

struct GradientCovariance {
  SymMatrix cov;           // Cov over (X, K) of the per-pair gradient
  double mean_norm = 0.0;  // l2 norm of the mean gradient; 0 at the data law
};

GradientCovariance gradient_covariance(const IsingModel& m, const MaskDistribution& d,
                                       const std::vector<double>& theta);

// Cov_p(phi): curvature of the full (unmasked) log-likelihood.
SymMatrix fisher_information(const IsingModel& m);

// Asymptotic covariance of the masked estimator: inverse population
// curvature at the data-generating parameters. The sandwich collapses
// because curvature and gradient covariance coincide there.
SymMatrix asymptotic_covariance(const IsingModel& m, const MaskDistribution& d);

struct InformationEqualityReport {
  double rel_gap = 0.0;        // ||H - Cov(g)||_F / max(1, ||H||_F)
  double mean_grad_norm = 0.0;
  bool ok = false;
};

// Second Bartlett identity at the data law: population curvature equals the
// gradient covariance, so the asymptotic covariance is the plain inverse.
InformationEqualityReport check_information_equality(const IsingModel& m,
                                                     const MaskDistribution& d,
                                                     double tol = 1e-10);

struct MonotonicityReport {
  std::vector<int> ks;
  std::vector<double> traces;    // trace of the asymptotic covariance per k
  std::vector<double> psd_gaps;  // eigmin(Gamma_{k} - Gamma_{k+1}), consecutive ks
  bool traces_decreasing = false;
  bool ok = false;               // every gap >= -tol
};

// Resampling more coordinates per sample can only shrink the asymptotic
// covariance, down to the inverse Fisher information at k = n.
MonotonicityReport check_gamma_monotone(const IsingModel& m, const std::vector<int>& ks,
                                        double tol = 1e-8);

struct VarianceBoundReport {
  double poincare_c = 0.0;
  double psd_gap = 0.0;  // eigmin(C * Fisher^{-1} - Gamma)
  bool infinite_c = false;
  bool ok = false;
};

// Gamma <= C * Fisher^{-1} in the semidefinite order, with C the Poincare
// constant of the matching block-resampling chain. An infinite C makes the
// bound vacuous; it is reported as such rather than as a failure.
VarianceBoundReport check_variance_bound(const SymMatrix& gamma, const SymMatrix& fisher,
                                         double poincare_c, double tol = 1e-8);

}  // namespace gmlm
