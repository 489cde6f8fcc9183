#include "gmlm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "gmlm/asymptotics.hpp"
#include "gmlm/chains.hpp"
#include "gmlm/errors.hpp"
#include "gmlm/numerics.hpp"

namespace gmlm {

void SuiteResult::add(const std::string& name, bool ok, const std::string& detail) {
  checks.push_back({name, ok, detail});
  all_ok = all_ok && ok;
}

namespace {

std::string num(double v) {
  std::ostringstream o;
  o.precision(3);
  o << std::scientific << v;
  return o.str();
}

// Worst deviation across instances; a property passes when every sample
// stayed at or below its tolerance.
struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  int instance = -1;
  int samples = 0;

  void feed(double v, int inst) {
    ++samples;
    if (v > value) {
      value = v;
      instance = inst;
    }
  }
  bool below(double tol) const { return samples > 0 && value <= tol; }
  std::string detail(double tol) const {
    if (samples == 0) return "no samples";
    return "worst=" + num(value) + " tol=" + num(tol) + " instance=" +
           std::to_string(instance) + " samples=" + std::to_string(samples);
  }
};

RngStream suite_root(const VerifyOptions& opt, std::uint64_t tag) {
  return RngStream(opt.seed).derive(tag);
}

std::vector<std::uint32_t> random_block_set(RngStream& rng, int n) {
  const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  std::vector<std::uint32_t> blocks = all_blocks_of_size(n, k);
  if (k < n && rng.uniform01() < 0.5) {
    const auto more = all_blocks_of_size(n, k + 1);
    blocks.insert(blocks.end(), more.begin(), more.end());
  }
  return blocks;
}

std::vector<double> random_positive_simplex(RngStream& rng, std::size_t len) {
  std::vector<double> p(len);
  double total = 0.0;
  for (double& v : p) {
    v = 0.1 + rng.uniform01();
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> random_vector(RngStream& rng, std::size_t len) {
  std::vector<double> f(len);
  for (double& v : f) v = 2.0 * rng.uniform01() - 1.0;
  return f;
}

double l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double l2(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

double rel_frobenius_diff(const SymMatrix& a, const SymMatrix& b) {
  return a.minus(b).frobenius() / std::max(1.0, b.frobenius());
}

}  // namespace

IsingModel random_model(RngStream& rng, int n, double field_scale, double coupling_scale) {
  require(n >= 1 && n <= 20, ErrKind::Validation, "random_model: n must lie in [1, 20]");
  IsingModel m;
  m.n = n;
  m.h.resize(static_cast<std::size_t>(n));
  for (double& v : m.h) v = field_scale * (2.0 * rng.uniform01() - 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      m.edges.push_back({i, j, coupling_scale * (2.0 * rng.uniform01() - 1.0)});
  m.validate();
  return m;
}

MaskDistribution random_weighted_law(RngStream& rng, int n) {
  auto blocks = random_block_set(rng, n);
  auto probs = random_positive_simplex(rng, blocks.size());
  return MaskDistribution::weighted(n, std::move(blocks), std::move(probs));
}

MaskDistribution random_adaptive_law(RngStream& rng, int n) {
  auto blocks = random_block_set(rng, n);
  const std::size_t rows = std::size_t{1} << n;
  std::vector<std::vector<double>> table(rows);
  for (auto& row : table) row = random_positive_simplex(rng, blocks.size());
  return MaskDistribution::adaptive(n, std::move(blocks), std::move(table));
}

IsingModel random_clique_model(RngStream& rng, int n_min, int n_max) {
  require(4 <= n_min && n_min <= n_max && n_max <= 20, ErrKind::Validation,
          "random_clique_model: need 4 <= n_min <= n_max <= 20");
  const int n = n_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_max - n_min + 1)));
  const int c_hi = std::min(n, 6);
  const int c = 4 + static_cast<int>(rng.below(static_cast<std::uint64_t>(c_hi - 4 + 1)));
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int t = 0; t < c; ++t) {
    const int r = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - t)));
    std::swap(perm[static_cast<std::size_t>(t)], perm[static_cast<std::size_t>(r)]);
  }
  std::vector<int> members(perm.begin(), perm.begin() + c);
  std::sort(members.begin(), members.end());

  CliqueParams p;
  p.n = n;
  p.clique = members;
  p.fields.assign(static_cast<std::size_t>(n), 0.0);
  for (int i : members) p.fields[static_cast<std::size_t>(i)] = 0.05 + 0.25 * rng.uniform01();
  for (int i = 0; i < n; ++i) {
    if (std::find(members.begin(), members.end(), i) == members.end())
      p.fields[static_cast<std::size_t>(i)] = 0.02 * (2.0 * rng.uniform01() - 1.0);
  }
  double h_l1 = 0.0;
  for (double v : p.fields) h_l1 += std::abs(v);
  // margin = j0; tanh(0.8) * 4 / 2 > 1, so the stuck constant is positive.
  p.coupling = h_l1 + 0.8 + 0.8 * rng.uniform01();
  return build_clique_ising(p);
}

SuiteResult verify_conditionals(const VerifyOptions& opt) {
  SuiteResult r;
  r.suite = "conditionals";
  RngStream root = suite_root(opt, 11);
  Worst brute, reduce, adapt, identity;
  for (int t = 0; t < opt.count; ++t) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(t));
    const int n = 2 + static_cast<int>(rng.below(3));
    const IsingModel m = random_model(rng, n, 0.5, 0.6);
    const FiniteDistribution joint = joint_table(m);
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);

    for (int rep = 0; rep < 3; ++rep) {
      const auto x = static_cast<SpinConfig>(rng.below(std::uint64_t{1} << n));
      const auto block = static_cast<std::uint32_t>(1 + rng.below(full));
      const FiniteDistribution cond = block_conditional(m, x, block);
      const SpinConfig rest = x & ~block;
      std::vector<double> direct(cond.size());
      double denom = 0.0;
      for (std::size_t a = 0; a < direct.size(); ++a) {
        const SpinConfig y = rest | deposit_bits(static_cast<std::uint32_t>(a), block);
        direct[a] = joint.p[y];
        denom += direct[a];
      }
      for (std::size_t a = 0; a < direct.size(); ++a)
        brute.feed(std::abs(direct[a] / denom - cond.p[a]), t);
    }

    const MaskDistribution uk = MaskDistribution::uniform_k(n, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
    const MaskDistribution wl = random_weighted_law(rng, n);
    const MaskDistribution al = random_adaptive_law(rng, n);
    for (const MaskDistribution* d : {&uk, &wl}) {
      const auto x = static_cast<SpinConfig>(rng.below(std::uint64_t{1} << n));
      const std::uint32_t block = sample_mask(*d, rng, x);
      const FiniteDistribution c1 = masked_conditional(m, *d, x, block);
      const FiniteDistribution c2 = block_conditional(m, x, block);
      for (std::size_t a = 0; a < c1.size(); ++a) reduce.feed(std::abs(c1.p[a] - c2.p[a]), t);
    }
    {
      const auto x = static_cast<SpinConfig>(rng.below(std::uint64_t{1} << n));
      const std::uint32_t block = sample_mask(al, rng, x);
      const FiniteDistribution c1 = masked_conditional(m, al, x, block);
      const FiniteDistribution c2 = adaptive_conditional(joint, al, x, block);
      for (std::size_t a = 0; a < c1.size(); ++a) adapt.feed(std::abs(c1.p[a] - c2.p[a]), t);
    }
    identity.feed(marginalization_identity_check(joint, al), t);
  }
  r.add("block conditional matches joint renormalization", brute.below(1e-12), brute.detail(1e-12));
  r.add("masked conditional reduces to the block conditional under config-independent laws",
        reduce.below(0.0), reduce.detail(0.0));
  r.add("masked conditional matches the modified completion law under adaptive masking",
        adapt.below(1e-12), adapt.detail(1e-12));
  r.add("plain conditionals are the mask-law mixture of modified conditionals",
        identity.below(1e-10), identity.detail(1e-10));
  return r;
}

SuiteResult verify_convexity(const VerifyOptions& opt) {
  SuiteResult r;
  r.suite = "convexity";
  RngStream root = suite_root(opt, 12);
  Worst psd_pop, psd_sample, grad_pop, grad_sample;
  for (int t = 0; t < opt.count; ++t) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(t));
    const int n = 2 + static_cast<int>(rng.below(3));
    const IsingModel m = random_model(rng, n, 0.5, 0.6);
    MaskDistribution d;
    switch (t % 3) {
      case 0: d = MaskDistribution::uniform_k(n, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))); break;
      case 1: d = random_weighted_law(rng, n); break;
      default: d = random_adaptive_law(rng, n); break;
    }
    const std::vector<double> theta = theta_from_model(random_model(rng, n, 0.4, 0.5));

    const PairWeights pop = population_pair_weights(m, d);
    psd_pop.feed(-psd_gap(loss_hessian(theta, pop, d)), t);
    const auto f_pop = [&](const std::vector<double>& th) { return mple_loss(th, pop, d); };
    const std::vector<double> g_pop = mple_gradient(theta, pop, d);
    grad_pop.feed(l2_diff(g_pop, finite_diff_gradient(f_pop, theta, 1e-5)) /
                      std::max(1.0, l2(g_pop)),
                  t);

    RngStream srng = rng.derive(7);
    const std::vector<SpinConfig> configs = exact_sample(m, srng, 40);
    MaskedDataset data;
    data.n = n;
    for (std::size_t s = 0; s < configs.size(); ++s) {
      data.seq_index.push_back(static_cast<int>(s));
      data.configs.push_back(configs[s]);
      data.masks.push_back(sample_mask(d, srng, configs[s]));
    }
    psd_sample.feed(-psd_gap(loss_hessian(theta, data, d)), t);
    const auto f_smp = [&](const std::vector<double>& th) { return mple_loss(th, data, d); };
    const std::vector<double> g_smp = mple_gradient(theta, data, d);
    grad_sample.feed(l2_diff(g_smp, finite_diff_gradient(f_smp, theta, 1e-5)) /
                         std::max(1.0, l2(g_smp)),
                     t);
  }
  r.add("population curvature is positive semidefinite everywhere", psd_pop.below(1e-8),
        psd_pop.detail(1e-8));
  r.add("sample curvature is positive semidefinite everywhere", psd_sample.below(1e-8),
        psd_sample.detail(1e-8));
  r.add("analytic gradient matches central differences on the population objective",
        grad_pop.below(1e-5), grad_pop.detail(1e-5));
  r.add("analytic gradient matches central differences on sampled data", grad_sample.below(1e-5),
        grad_sample.detail(1e-5));
  return r;
}

SuiteResult verify_information_equality(const VerifyOptions& opt) {
  SuiteResult r;
  r.suite = "information-equality";
  RngStream root = suite_root(opt, 13);
  Worst gap, mean;
  for (int t = 0; t < opt.count; ++t) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(t));
    const int n = 2 + static_cast<int>(rng.below(3));
    const IsingModel m = random_model(rng, n, 0.5, 0.6);
    const MaskDistribution laws[3] = {
        MaskDistribution::uniform_k(n, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))),
        random_weighted_law(rng, n), random_adaptive_law(rng, n)};
    for (const MaskDistribution& d : laws) {
      const InformationEqualityReport rep = check_information_equality(m, d, 1e-10);
      gap.feed(rep.rel_gap, t);
      mean.feed(rep.mean_grad_norm, t);
    }
  }
  r.add("population curvature equals the per-pair gradient covariance at the data law",
        gap.below(1e-10), gap.detail(1e-10));
  r.add("mean per-pair gradient vanishes at the data law", mean.below(1e-10), mean.detail(1e-10));
  return r;
}

SuiteResult verify_monotonicity(const VerifyOptions& opt) {
  SuiteResult r;
  r.suite = "monotonicity";
  RngStream root = suite_root(opt, 14);
  Worst gap, fisher_dev;
  int order_failures = 0;
  int instances = 0;
  for (int t = 0; t < opt.count; ++t) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(t));
    const int n = 3 + static_cast<int>(rng.below(2));
    const IsingModel m = random_model(rng, n, 0.5, 0.6);
    std::vector<int> ks(static_cast<std::size_t>(n));
    std::iota(ks.begin(), ks.end(), 1);
    const MonotonicityReport rep = check_gamma_monotone(m, ks, 1e-8);
    ++instances;
    if (!rep.traces_decreasing) ++order_failures;
    for (double g : rep.psd_gaps) gap.feed(-g, t);
    const SymMatrix gamma_full = asymptotic_covariance(m, MaskDistribution::uniform_k(n, n));
    fisher_dev.feed(rel_frobenius_diff(gamma_full, invert_spd(fisher_information(m))), t);
  }
  r.add("covariance trace shrinks as the resampled block grows", order_failures == 0,
        std::to_string(order_failures) + " of " + std::to_string(instances) +
            " instances out of order");
  r.add("consecutive covariances are semidefinite ordered", gap.below(1e-8), gap.detail(1e-8));
  r.add("the full-block covariance is the inverse Fisher information", fisher_dev.below(1e-9),
        fisher_dev.detail(1e-9));
  return r;
}

SuiteResult verify_dirichlet(const VerifyOptions& opt) {
  SuiteResult r;
  r.suite = "dirichlet";
  RngStream root = suite_root(opt, 15);
  Worst rows, stationary, ident, resid, slack, lift;
  for (int t = 0; t < opt.count; ++t) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(t));
    const int n = 2 + static_cast<int>(rng.below(3));
    const IsingModel m = random_model(rng, n, 0.5, 0.6);
    const MaskDistribution al = random_adaptive_law(rng, n);
    const ChainSpec specs[4] = {
        ChainSpec::k_gibbs(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))),
        ChainSpec::weighted_block(random_weighted_law(rng, n)), ChainSpec::adaptive_block(al),
        ChainSpec::independent_parallel()};
    for (const ChainSpec& spec : specs) {
      const ChainMatrix cm = transition_matrix(m, spec);
      for (std::size_t i = 0; i < cm.nstates; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cm.nstates; ++j) s += cm.at(i, j);
        rows.feed(std::abs(s - 1.0), t);
      }
      if (spec.kind == ChainKind::IndependentParallel) continue;
      for (std::size_t j = 0; j < cm.nstates; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < cm.nstates; ++i) s += cm.pi[i] * cm.at(i, j);
        stationary.feed(std::abs(s - cm.pi[j]), t);
      }
      for (int rep = 0; rep < 3; ++rep) {
        const std::vector<double> f = random_vector(rng, cm.nstates);
        const std::vector<double> g = random_vector(rng, cm.nstates);
        const double form = dirichlet_form(cm, f, g);
        const double inner = dirichlet_inner(cm, f, g);
        ident.feed(std::abs(form - inner) / std::max(1.0, std::abs(form)), t);
      }
      const PoincareResult pc = poincare_constant(cm);
      resid.feed(pc.reversibility_residual, t);
      if (!pc.infinite) {
        for (int rep = 0; rep < 4; ++rep) {
          const std::vector<double> f = random_vector(rng, cm.nstates);
          slack.feed(pi_variance(cm, f) - pc.c * dirichlet_form(cm, f, f), t);
        }
      }
    }
    const ChainMatrix pair = adaptive_pair_matrix(m, al);
    const ChainMatrix coll = transition_matrix(m, ChainSpec::adaptive_block(al));
    for (int rep = 0; rep < 3; ++rep) {
      const std::vector<double> f = random_vector(rng, coll.nstates);
      std::vector<double> f_lift(pair.nstates);
      for (std::size_t s = 0; s < pair.nstates; ++s) f_lift[s] = f[pair.pair_states[s].first];
      const double d_pair = dirichlet_form(pair, f_lift, f_lift);
      const double d_coll = dirichlet_form(coll, f, f);
      lift.feed(std::abs(d_pair - d_coll) / std::max(1.0, std::abs(d_coll)), t);
    }
  }
  r.add("transition rows sum to one", rows.below(1e-12), rows.detail(1e-12));
  r.add("the model joint is stationary for every block chain", stationary.below(1e-12),
        stationary.detail(1e-12));
  r.add("energy form agrees with the <f,(I-P)g> inner product on reversible chains",
        ident.below(1e-10), ident.detail(1e-10));
  r.add("block chains are reversible", resid.below(1e-8), resid.detail(1e-8));
  r.add("variance is bounded by the spectral constant times the energy form", slack.below(1e-10),
        slack.detail(1e-10));
  r.add("fixed-block and redrawn-block chains share the energy form on config functions",
        lift.below(1e-12), lift.detail(1e-12));
  return r;
}

SuiteResult verify_variance_bound(const VerifyOptions& opt) {
  SuiteResult r;
  r.suite = "variance-bound";
  RngStream root = suite_root(opt, 16);
  Worst gap, tight_c, tight_gamma;
  int pair_flag_failures = 0;
  int vacuous_failures = 0;
  int instances = 0;
  for (int t = 0; t < opt.count; ++t) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(t));
    const int n = 2 + static_cast<int>(rng.below(3));
    const IsingModel m = random_model(rng, n, 0.5, 0.6);
    const SymMatrix fisher = fisher_information(m);
    ++instances;

    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const MaskDistribution uk = MaskDistribution::uniform_k(n, k);
    const MaskDistribution wl = random_weighted_law(rng, n);
    MaskDistribution al = random_adaptive_law(rng, n);
    const std::uint32_t full = (1u << n) - 1u;
    while (al.blocks.size() == 1 && al.blocks[0] == full) al = random_adaptive_law(rng, n);

    const std::pair<const MaskDistribution*, ChainSpec> cases[3] = {
        {&uk, ChainSpec::k_gibbs(k)},
        {&wl, ChainSpec::weighted_block(wl)},
        {&al, ChainSpec::adaptive_block(al)}};
    for (const auto& [d, spec] : cases) {
      const SymMatrix gamma = asymptotic_covariance(m, *d);
      const PoincareResult pc = poincare_constant(transition_matrix(m, spec));
      const VarianceBoundReport rep = check_variance_bound(gamma, fisher, pc.c, 1e-8);
      if (!rep.infinite_c) gap.feed(-rep.psd_gap, t);
    }

    const SymMatrix gamma_full = asymptotic_covariance(m, MaskDistribution::uniform_k(n, n));
    const PoincareResult pc_full = poincare_constant(transition_matrix(m, ChainSpec::k_gibbs(n)));
    tight_c.feed(std::abs(pc_full.c - 1.0), t);
    tight_gamma.feed(rel_frobenius_diff(gamma_full, invert_spd(fisher)), t);

    const PoincareResult pc_pair = poincare_constant(adaptive_pair_matrix(m, al));
    if (!pc_pair.infinite) ++pair_flag_failures;
    const VarianceBoundReport vac =
        check_variance_bound(asymptotic_covariance(m, al), fisher, pc_pair.c, 1e-8);
    if (!(vac.infinite_c && vac.ok)) ++vacuous_failures;
  }
  r.add("estimator covariance is bounded by the spectral multiple of the inverse Fisher",
        gap.below(1e-8), gap.detail(1e-8));
  r.add("the full-block chain has spectral constant one", tight_c.below(1e-8),
        tight_c.detail(1e-8));
  r.add("the bound is tight at the full block", tight_gamma.below(1e-9),
        tight_gamma.detail(1e-9));
  r.add("the fixed-block pair chain has no finite spectral constant", pair_flag_failures == 0,
        std::to_string(pair_flag_failures) + " of " + std::to_string(instances) +
            " pair chains had a spectral gap");
  r.add("an infinite constant is reported as vacuous rather than violated", vacuous_failures == 0,
        std::to_string(vacuous_failures) + " of " + std::to_string(instances) + " misreported");
  return r;
}

SuiteResult verify_modes(const VerifyOptions& opt) {
  SuiteResult r;
  r.suite = "modes";
  RngStream root = suite_root(opt, 17);
  Worst bij;
  int order_failures = 0;
  int premise_failures = 0;
  int instances = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < opt.count; ++t) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(t));
    const IsingModel m = random_clique_model(rng, 5, 8);
    ++instances;
    if (!check_strongly_ferromagnetic(m).holds) ++premise_failures;
    const ModeOrderingReport rep = verify_mode_ordering(m);
    if (!rep.ordered) ++order_failures;
    worst_margin = std::min(worst_margin, rep.margin_plus_over_minus);
    bij.feed(rep.bijection_max_dev, t);
  }
  r.add("generated instances satisfy the ferromagnetic premise", premise_failures == 0,
        std::to_string(premise_failures) + " of " + std::to_string(instances) + " failed");
  r.add("all-plus states outweigh all-minus states outweigh the remainder", order_failures == 0,
        std::to_string(order_failures) + " of " + std::to_string(instances) +
            " out of order; worst plus-over-minus margin=" + num(worst_margin));
  r.add("clique flips shift log mass by exactly twice the clique field sum", bij.below(1e-9),
        bij.detail(1e-9));
  return r;
}

SuiteResult verify_hitting(const VerifyOptions& opt) {
  SuiteResult r;
  r.suite = "hitting";
  RngStream root = suite_root(opt, 18);
  Worst fast_slack, slow_slack, nontrivial;
  for (int t = 0; t < opt.count; ++t) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(t));
    const IsingModel m = random_clique_model(rng, 5, 7);
    const CliqueScales v = clique_scales(m);
    const int k = v.c + static_cast<int>(rng.below(static_cast<std::uint64_t>(m.n - v.c + 1)));
    const double c_fast = mode_fast_constant(m, k);
    nontrivial.feed(c_fast - 1.0, t);

    const ChainMatrix cm = transition_matrix(m, ChainSpec::k_gibbs(k));
    std::vector<std::uint8_t> target(cm.nstates, 0);
    for (std::size_t x = 0; x < cm.nstates; ++x)
      target[x] = in_mode(v.cmask, +1, static_cast<SpinConfig>(x)) ? 1 : 0;
    for (int steps : {1, 5, 20}) {
      const std::vector<double> u = hitting_probability_exact(cm, target, steps);
      const double umin = *std::min_element(u.begin(), u.end());
      fast_slack.feed((1.0 - std::pow(c_fast, steps)) - umin, t);
    }

    const ModeSlowConstants slow = mode_slow_constants(m, 0.5);
    if (slow.c_stuck > 0.0) {
      const ChainMatrix ind = transition_matrix(m, ChainSpec::independent_parallel());
      std::vector<std::uint8_t> escape(ind.nstates, 0);
      for (std::size_t x = 0; x < ind.nstates; ++x)
        escape[x] = in_mode(v.cmask, +1, static_cast<SpinConfig>(x)) ? 0 : 1;
      const auto all_plus = static_cast<SpinConfig>((1u << m.n) - 1u);
      // The union bound holds at every horizon, not only at the step bound.
      for (int steps : {1, 20}) {
        const std::vector<double> u = hitting_probability_exact(ind, escape, steps);
        slow_slack.feed(u[all_plus] - static_cast<double>(steps) * std::exp(-slow.c_stuck), t);
      }
    }
  }
  r.add("one step from any state reaches the mode with chance at least 1 - c_fast",
        fast_slack.below(1e-12), fast_slack.detail(1e-12));
  r.add("the one-step miss constant is informative (below one) at k >= clique size",
        nontrivial.below(-1e-6), nontrivial.detail(-1e-6));
  r.add("the site-parallel chain escapes the mode no faster than the union bound",
        slow_slack.below(1e-12), slow_slack.detail(1e-12));
  return r;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "conditionals", "convexity",      "information-equality", "monotonicity",
      "dirichlet",    "variance-bound", "modes",                "hitting"};
  return names;
}

std::vector<SuiteResult> run_suites(const std::vector<std::string>& names,
                                    const VerifyOptions& opt) {
  require(opt.count >= 1, ErrKind::Validation, "verify: count must be >= 1");
  bool all = names.empty();
  for (const std::string& s : names) {
    if (s == "all") {
      all = true;
      continue;
    }
    const auto& known = suite_names();
    require(std::find(known.begin(), known.end(), s) != known.end(), ErrKind::Validation,
            "unknown suite: " + s);
  }
  const auto selected = [&](const char* s) {
    return all || std::find(names.begin(), names.end(), s) != names.end();
  };
  std::vector<SuiteResult> out;
  if (selected("conditionals")) out.push_back(verify_conditionals(opt));
  if (selected("convexity")) out.push_back(verify_convexity(opt));
  if (selected("information-equality")) out.push_back(verify_information_equality(opt));
  if (selected("monotonicity")) out.push_back(verify_monotonicity(opt));
  if (selected("dirichlet")) out.push_back(verify_dirichlet(opt));
  if (selected("variance-bound")) out.push_back(verify_variance_bound(opt));
  if (selected("modes")) out.push_back(verify_modes(opt));
  if (selected("hitting")) out.push_back(verify_hitting(opt));
  return out;
}

}  // namespace gmlm
