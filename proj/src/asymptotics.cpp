#include "gmlm/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmlm/kernels.hpp"

namespace gmlm {

PairWeights population_pair_weights(const IsingModel& m, const MaskDistribution& d) {
  m.validate();
  d.validate();
  require(d.n == m.n, ErrKind::Validation, "mask law dimension differs from model");
  const FiniteDistribution joint = joint_table(m);
  std::vector<std::uint32_t> blocks;
  if (d.kind == MaskKind::UniformK)
    blocks = all_blocks_of_size(d.n, d.k);
  else
    blocks = d.blocks;
  PairWeights pw;
  pw.n = m.n;
  for (std::size_t xi = 0; xi < joint.size(); ++xi) {
    const auto x = static_cast<SpinConfig>(xi);
    if (joint.p[xi] == 0.0) continue;
    for (std::uint32_t b : blocks) {
      const double w = joint.p[xi] * d.block_prob(b, x);
      if (w == 0.0) continue;
      pw.configs.push_back(x);
      pw.masks.push_back(b);
      pw.weights.push_back(w);
    }
  }
  return pw;
}

SymMatrix population_hessian(const IsingModel& m, const MaskDistribution& d,
                             const std::vector<double>& theta) {
  return loss_hessian(theta, population_pair_weights(m, d), d);
}

GradientCovariance gradient_covariance(const IsingModel& m, const MaskDistribution& d,
                                       const std::vector<double>& theta) {
  const PairWeights pw = population_pair_weights(m, d);
  const IsingModel mt = model_from_theta(m.n, theta);
  const int dim = theta_dim(m.n);
  GradientCovariance out;
  out.cov = SymMatrix(dim);
  std::vector<double> mean(dim, 0.0);
  std::vector<double> g(dim), phi_x(dim), phi_y(dim), ephi(dim);
  for (std::size_t r = 0; r < pw.configs.size(); ++r) {
    const SpinConfig x = pw.configs[r];
    const std::uint32_t block = pw.masks[r];
    const double w = pw.weights[r];
    const FiniteDistribution q = masked_conditional(mt, d, x, block);
    const SpinConfig rest = x & ~block;
    std::fill(ephi.begin(), ephi.end(), 0.0);
    for (std::size_t a = 0; a < q.size(); ++a) {
      if (q.p[a] == 0.0) continue;
      const SpinConfig y = rest | deposit_bits(static_cast<std::uint32_t>(a), block);
      fill_phi(m.n, y, phi_y);
      kern::axpy(q.p[a], phi_y.data(), ephi.data(), phi_y.size());
    }
    fill_phi(m.n, x, phi_x);
    for (int c = 0; c < dim; ++c) g[c] = ephi[c] - phi_x[c];
    kern::axpy(w, g.data(), mean.data(), g.size());
    for (int c = 0; c < dim; ++c)
      for (int e = c; e < dim; ++e) out.cov.add_sym(c, e, w * g[c] * g[e]);
  }
  for (int c = 0; c < dim; ++c)
    for (int e = c; e < dim; ++e) out.cov.add_sym(c, e, -mean[c] * mean[e]);
  out.mean_norm = std::sqrt(kern::dot(mean.data(), mean.data(), mean.size()));
  return out;
}

SymMatrix fisher_information(const IsingModel& m) {
  m.validate();
  const FiniteDistribution joint = joint_table(m);
  const int dim = theta_dim(m.n);
  SymMatrix cov(dim);
  std::vector<double> mean(dim, 0.0), phi(dim);
  for (std::size_t xi = 0; xi < joint.size(); ++xi) {
    if (joint.p[xi] == 0.0) continue;
    fill_phi(m.n, static_cast<SpinConfig>(xi), phi);
    kern::axpy(joint.p[xi], phi.data(), mean.data(), phi.size());
    for (int c = 0; c < dim; ++c)
      for (int e = c; e < dim; ++e) cov.add_sym(c, e, joint.p[xi] * phi[c] * phi[e]);
  }
  for (int c = 0; c < dim; ++c)
    for (int e = c; e < dim; ++e) cov.add_sym(c, e, -mean[c] * mean[e]);
  return cov;
}

SymMatrix asymptotic_covariance(const IsingModel& m, const MaskDistribution& d) {
  return invert_spd(population_hessian(m, d, theta_from_model(m)));
}

InformationEqualityReport check_information_equality(const IsingModel& m,
                                                     const MaskDistribution& d, double tol) {
  const std::vector<double> theta = theta_from_model(m);
  const SymMatrix h = population_hessian(m, d, theta);
  const GradientCovariance gc = gradient_covariance(m, d, theta);
  InformationEqualityReport r;
  r.rel_gap = h.minus(gc.cov).frobenius() / std::max(1.0, h.frobenius());
  r.mean_grad_norm = gc.mean_norm;
  r.ok = r.rel_gap <= tol && r.mean_grad_norm <= tol;
  return r;
}

MonotonicityReport check_gamma_monotone(const IsingModel& m, const std::vector<int>& ks,
                                        double tol) {
  require(!ks.empty(), ErrKind::Validation, "monotonicity check: empty k list");
  for (std::size_t i = 1; i < ks.size(); ++i)
    require(ks[i] > ks[i - 1], ErrKind::Validation, "monotonicity check: ks must increase");
  MonotonicityReport r;
  r.ks = ks;
  std::vector<SymMatrix> gammas;
  for (int k : ks) {
    gammas.push_back(asymptotic_covariance(m, MaskDistribution::uniform_k(m.n, k)));
    r.traces.push_back(gammas.back().trace());
  }
  r.traces_decreasing = true;
  r.ok = true;
  for (std::size_t i = 0; i + 1 < gammas.size(); ++i) {
    const double gap = psd_gap(gammas[i].minus(gammas[i + 1]));
    r.psd_gaps.push_back(gap);
    if (gap < -tol) r.ok = false;
    if (!(r.traces[i + 1] < r.traces[i])) r.traces_decreasing = false;
  }
  return r;
}

VarianceBoundReport check_variance_bound(const SymMatrix& gamma, const SymMatrix& fisher,
                                         double poincare_c, double tol) {
  VarianceBoundReport r;
  r.poincare_c = poincare_c;
  if (!std::isfinite(poincare_c)) {
    r.infinite_c = true;
    r.psd_gap = std::numeric_limits<double>::infinity();
    r.ok = true;  // vacuous
    return r;
  }
  require(poincare_c > 0.0, ErrKind::Validation, "variance bound: constant must be positive");
  const SymMatrix bound = invert_spd(fisher).scaled(poincare_c);
  r.psd_gap = psd_gap(bound.minus(gamma));
  r.ok = r.psd_gap >= -tol;
  return r;
}

}  // namespace gmlm
