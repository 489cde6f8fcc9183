#include "gmlm/chains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmlm/kernels.hpp"

namespace gmlm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t config_count(int n) { return std::size_t{1} << n; }

void require_matrix_capacity(std::size_t nstates) {
  require(nstates <= 8192, ErrKind::Capacity,
          "transition matrix: state space exceeds 8192 states");
}

// log(2^c - 2) for c >= 2, without forming 2^c in the mantissa-limited range.
double log_pow2_minus_2(int c) {
  return c * std::log(2.0) + std::log1p(-std::pow(2.0, 1 - c));
}

}  // namespace

ChainSpec ChainSpec::k_gibbs(int k) {
  ChainSpec s;
  s.kind = ChainKind::KGibbs;
  s.k = k;
  return s;
}

ChainSpec ChainSpec::independent_parallel() {
  ChainSpec s;
  s.kind = ChainKind::IndependentParallel;
  return s;
}

ChainSpec ChainSpec::weighted_block(MaskDistribution d) {
  require(d.kind == MaskKind::Weighted, ErrKind::Validation,
          "weighted_block: mask law must be Weighted");
  ChainSpec s;
  s.kind = ChainKind::WeightedBlock;
  s.mask = std::move(d);
  return s;
}

ChainSpec ChainSpec::adaptive_block(MaskDistribution d) {
  require(d.kind == MaskKind::Adaptive, ErrKind::Validation,
          "adaptive_block: mask law must be Adaptive");
  ChainSpec s;
  s.kind = ChainKind::AdaptiveBlock;
  s.mask = std::move(d);
  return s;
}

SpinConfig chain_step(const IsingModel& m, const ChainSpec& spec, SpinConfig x, RngStream& rng) {
  switch (spec.kind) {
    case ChainKind::KGibbs: {
      const MaskDistribution law = MaskDistribution::uniform_k(m.n, spec.k);
      const std::uint32_t block = sample_mask(law, rng, x);
      const FiniteDistribution cond = block_conditional(m, x, block);
      const auto a = static_cast<std::uint32_t>(cond.sample(rng));
      return (x & ~block) | deposit_bits(a, block);
    }
    case ChainKind::IndependentParallel: {
      SpinConfig y = 0;
      for (int i = 0; i < m.n; ++i) {
        const double p_plus = single_site_conditional(m, x, i);
        if (rng.uniform01() < p_plus) y |= 1u << i;
      }
      return y;
    }
    case ChainKind::WeightedBlock:
    case ChainKind::AdaptiveBlock: {
      require(spec.mask.n == m.n, ErrKind::Validation, "chain_step: mask law dimension differs");
      const std::uint32_t block = sample_mask(spec.mask, rng, x);
      const FiniteDistribution cond = masked_conditional(m, spec.mask, x, block);
      const auto a = static_cast<std::uint32_t>(cond.sample(rng));
      return (x & ~block) | deposit_bits(a, block);
    }
  }
  fail_validation("chain_step: unknown chain kind");
}

namespace {

// Accumulate one block's contribution for every source sharing a rest. The
// conditional of a block depends on the source only through the rest, so it
// is computed once per (rest, block) and scattered to all completions.
template <typename SourceWeight>
void scatter_block(const IsingModel& m, const MaskDistribution* law, std::uint32_t block,
                   std::vector<double>& p, const SourceWeight& weight_for_source) {
  const int n = m.n;
  const std::size_t nconf = config_count(n);
  const int k = std::popcount(block);
  const std::size_t na = std::size_t{1} << k;
  const int law_bi = law ? law->block_index(block) : -1;
  std::vector<SpinConfig> states(na);
  std::vector<double> lw(na);
  for (std::size_t xr = 0; xr < nconf; ++xr) {
    const auto rest = static_cast<SpinConfig>(xr);
    if ((rest & block) != 0) continue;  // one visit per rest class
    LogSumExp acc;
    bool any = false;
    for (std::size_t a = 0; a < na; ++a) {
      const SpinConfig y = rest | deposit_bits(static_cast<std::uint32_t>(a), block);
      states[a] = y;
      double v = log_weight(m, y);
      if (law) {
        const double pk = law->table[y][law_bi];
        v = pk > 0.0 ? v + std::log(pk) : -kInf;
      }
      lw[a] = v;
      any = any || std::isfinite(v);
    }
    if (!any) continue;  // class carries no mask mass; no source needs it
    for (double v : lw) acc.add(v);
    const double lz = acc.value();
    for (std::size_t src = 0; src < na; ++src) {
      const double w = weight_for_source(states[src]);
      if (w == 0.0) continue;
      double* row = &p[static_cast<std::size_t>(states[src]) * nconf];
      for (std::size_t dst = 0; dst < na; ++dst) {
        if (!std::isfinite(lw[dst])) continue;
        row[states[dst]] += w * std::exp(lw[dst] - lz);
      }
    }
  }
}

}  // namespace

ChainMatrix transition_matrix(const IsingModel& m, const ChainSpec& spec) {
  m.validate();
  const std::size_t nconf = config_count(m.n);
  require_matrix_capacity(nconf);
  ChainMatrix cm;
  cm.nstates = nconf;
  cm.p.assign(nconf * nconf, 0.0);
  cm.pi = joint_table(m).p;
  switch (spec.kind) {
    case ChainKind::KGibbs: {
      require(spec.k >= 1 && spec.k <= m.n, ErrKind::Validation,
              "transition_matrix: block size out of range");
      const auto blocks = all_blocks_of_size(m.n, spec.k);
      const double bp = 1.0 / static_cast<double>(blocks.size());
      for (std::uint32_t b : blocks)
        scatter_block(m, nullptr, b, cm.p, [&](SpinConfig) { return bp; });
      break;
    }
    case ChainKind::IndependentParallel: {
      std::vector<double> p_plus(m.n);
      std::vector<double> row(nconf);
      for (std::size_t xi = 0; xi < nconf; ++xi) {
        const auto x = static_cast<SpinConfig>(xi);
        for (int i = 0; i < m.n; ++i) p_plus[i] = single_site_conditional(m, x, i);
        row[0] = 1.0;
        std::size_t size = 1;
        for (int i = 0; i < m.n; ++i) {
          for (std::size_t s = 0; s < size; ++s) {
            row[s | (std::size_t{1} << i)] = row[s] * p_plus[i];
            row[s] *= 1.0 - p_plus[i];
          }
          size <<= 1;
        }
        std::copy(row.begin(), row.end(), cm.p.begin() + xi * nconf);
      }
      break;
    }
    case ChainKind::WeightedBlock: {
      require(spec.mask.kind == MaskKind::Weighted && spec.mask.n == m.n, ErrKind::Validation,
              "transition_matrix: weighted chain needs a matching Weighted law");
      for (std::size_t bi = 0; bi < spec.mask.blocks.size(); ++bi) {
        const double bp = spec.mask.probs[bi];
        if (bp == 0.0) continue;
        scatter_block(m, nullptr, spec.mask.blocks[bi], cm.p,
                      [&](SpinConfig) { return bp; });
      }
      break;
    }
    case ChainKind::AdaptiveBlock: {
      require(spec.mask.kind == MaskKind::Adaptive && spec.mask.n == m.n, ErrKind::Validation,
              "transition_matrix: adaptive chain needs a matching Adaptive law");
      for (std::size_t bi = 0; bi < spec.mask.blocks.size(); ++bi) {
        scatter_block(m, &spec.mask, spec.mask.blocks[bi], cm.p,
                      [&](SpinConfig src) { return spec.mask.table[src][bi]; });
      }
      break;
    }
  }
  return cm;
}

ChainMatrix adaptive_pair_matrix(const IsingModel& m, const MaskDistribution& d) {
  m.validate();
  d.validate();
  require(d.kind == MaskKind::Adaptive && d.n == m.n, ErrKind::Validation,
          "adaptive_pair_matrix: needs a matching Adaptive law");
  const std::size_t nconf = config_count(m.n);
  const FiniteDistribution joint = joint_table(m);
  ChainMatrix cm;
  std::vector<int> state_of(nconf * d.blocks.size(), -1);
  for (std::size_t xi = 0; xi < nconf; ++xi)
    for (std::size_t bi = 0; bi < d.blocks.size(); ++bi)
      if (d.table[xi][bi] > 0.0) {
        state_of[xi * d.blocks.size() + bi] = static_cast<int>(cm.pair_states.size());
        cm.pair_states.emplace_back(static_cast<SpinConfig>(xi), static_cast<int>(bi));
      }
  cm.nstates = cm.pair_states.size();
  require_matrix_capacity(cm.nstates);
  cm.p.assign(cm.nstates * cm.nstates, 0.0);
  cm.pi.resize(cm.nstates);
  for (std::size_t s = 0; s < cm.nstates; ++s) {
    const auto [x, bi] = cm.pair_states[s];
    cm.pi[s] = joint.p[x] * d.table[x][bi];
    const std::uint32_t block = d.blocks[bi];
    const FiniteDistribution cond = masked_conditional(m, d, x, block);
    const SpinConfig rest = x & ~block;
    for (std::size_t a = 0; a < cond.size(); ++a) {
      if (cond.p[a] == 0.0) continue;
      const SpinConfig y = rest | deposit_bits(static_cast<std::uint32_t>(a), block);
      const int t = state_of[y * d.blocks.size() + bi];
      require(t >= 0, ErrKind::Numeric, "adaptive_pair_matrix: moved to a zero-mass state");
      cm.p[s * cm.nstates + t] += cond.p[a];
    }
  }
  return cm;
}

double dirichlet_form(const ChainMatrix& cm, const std::vector<double>& f,
                      const std::vector<double>& g) {
  require(f.size() == cm.nstates && g.size() == cm.nstates, ErrKind::Validation,
          "dirichlet_form: function size differs from state count");
  double acc = 0.0;
  for (std::size_t x = 0; x < cm.nstates; ++x) {
    const double* row = &cm.p[x * cm.nstates];
    for (std::size_t y = 0; y < cm.nstates; ++y) {
      if (row[y] == 0.0) continue;
      acc += cm.pi[x] * row[y] * (f[x] - f[y]) * (g[x] - g[y]);
    }
  }
  return 0.5 * acc;
}

double dirichlet_inner(const ChainMatrix& cm, const std::vector<double>& f,
                       const std::vector<double>& g) {
  require(f.size() == cm.nstates && g.size() == cm.nstates, ErrKind::Validation,
          "dirichlet_inner: function size differs from state count");
  std::vector<double> pg(cm.nstates);
  kern::matvec(cm.p.data(), g.data(), pg.data(), cm.nstates, cm.nstates);
  double acc = 0.0;
  for (std::size_t x = 0; x < cm.nstates; ++x) acc += cm.pi[x] * f[x] * (g[x] - pg[x]);
  return acc;
}

double pi_mean(const ChainMatrix& cm, const std::vector<double>& f) {
  return kern::dot(cm.pi.data(), f.data(), cm.nstates);
}

double pi_variance(const ChainMatrix& cm, const std::vector<double>& f) {
  const double mean = pi_mean(cm, f);
  return kern::dot3(cm.pi.data(), f.data(), f.data(), cm.nstates) - mean * mean;
}

PoincareResult poincare_constant(const ChainMatrix& cm) {
  require(cm.nstates >= 1, ErrKind::Validation, "poincare_constant: empty chain");
  for (double v : cm.pi)
    require(v > 0.0, ErrKind::Validation, "poincare_constant: stationary law must be positive");
  double num = 0.0, den = 0.0;
  for (std::size_t x = 0; x < cm.nstates; ++x)
    for (std::size_t y = 0; y < cm.nstates; ++y) {
      const double fwd = cm.pi[x] * cm.at(x, y);
      const double bwd = cm.pi[y] * cm.at(y, x);
      num += (fwd - bwd) * (fwd - bwd);
      den += fwd * fwd;
    }
  PoincareResult r;
  r.reversibility_residual = std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
  require(r.reversibility_residual <= 1e-8, ErrKind::Numeric,
          "poincare_constant: chain is not reversible for its stationary law");
  SymMatrix s(static_cast<int>(cm.nstates));
  for (std::size_t x = 0; x < cm.nstates; ++x)
    for (std::size_t y = x; y < cm.nstates; ++y) {
      const double sxy = std::sqrt(cm.pi[x] / cm.pi[y]) * cm.at(x, y);
      const double syx = std::sqrt(cm.pi[y] / cm.pi[x]) * cm.at(y, x);
      s.set_sym(static_cast<int>(x), static_cast<int>(y), 0.5 * (sxy + syx));
    }
  const EigenDecomposition eig = jacobi_eigen(s);
  require(std::abs(eig.values[0] - 1.0) <= 1e-8, ErrKind::Numeric,
          "poincare_constant: top eigenvalue is not 1");
  if (cm.nstates == 1) {
    r.lambda2 = 0.0;
    r.c = 1.0;
    return r;
  }
  r.lambda2 = eig.values[1];
  if (r.lambda2 >= 1.0 - 1e-12) {
    r.infinite = true;
    r.c = kInf;
  } else {
    r.c = 1.0 / (1.0 - r.lambda2);
  }
  return r;
}

double mode_fast_constant(const CliqueScales& v, int k) {
  require(k >= 1 && k <= v.n, ErrKind::Validation, "mode_fast_constant: k out of range");
  if (k < v.c) return 1.0;  // a size-k block can never cover the clique
  // P(uniform size-k block contains the clique) = C(n-c, k-c) / C(n, k).
  double cover = 1.0;
  for (int i = 0; i < v.c; ++i)
    cover *= static_cast<double>(k - i) / static_cast<double>(v.n - i);
  // Conditional mass of the all-plus completion, written so nothing
  // overflows: 1 / (1 + exp(-2 h_g) + (2^c - 2) exp(-2 (j0 + h_g))).
  LogSumExp denom;
  denom.add(0.0);
  denom.add(-2.0 * v.h_g);
  denom.add(log_pow2_minus_2(v.c) - 2.0 * (v.j0 + v.h_g));
  const double mass = std::exp(-denom.value());
  return 1.0 - cover * mass;
}

double mode_fast_constant(const IsingModel& m, int k) {
  return mode_fast_constant(clique_scales(m), k);
}

ModeSlowConstants mode_slow_constants(const CliqueScales& v, double delta) {
  require(delta > 0.0 && delta < 1.0, ErrKind::Validation,
          "mode_slow_constants: delta must lie in (0, 1)");
  ModeSlowConstants out;
  const double rho = std::tanh(v.j0);  // = (1 - e^{-2 j0}) / (1 + e^{-2 j0})
  const double inner = rho * v.c / 2.0 - 1.0;
  if (inner <= 0.0) return out;  // drift too weak; the bound is vacuous
  out.c_stuck = 2.0 * inner * inner / v.c;
  const double t = std::floor(0.5 * delta * std::exp(out.c_stuck));
  constexpr double kMaxSteps = 9.0e18;
  out.t_bound = t > kMaxSteps ? static_cast<long long>(kMaxSteps)
                              : static_cast<long long>(t);
  out.escape_prob_bound = static_cast<double>(out.t_bound) * std::exp(-out.c_stuck);
  return out;
}

ModeSlowConstants mode_slow_constants(const IsingModel& m, double delta) {
  return mode_slow_constants(clique_scales(m), delta);
}

std::vector<double> hitting_probability_exact(const ChainMatrix& cm,
                                              const std::vector<std::uint8_t>& target,
                                              int steps) {
  require(target.size() == cm.nstates, ErrKind::Validation,
          "hitting probability: target size differs from state count");
  require(steps >= 0, ErrKind::Validation, "hitting probability: negative step count");
  std::vector<double> u(cm.nstates), buf(cm.nstates);
  for (std::size_t x = 0; x < cm.nstates; ++x) u[x] = target[x] ? 1.0 : 0.0;
  for (int t = 0; t < steps; ++t) {
    kern::matvec(cm.p.data(), u.data(), buf.data(), cm.nstates, cm.nstates);
    for (std::size_t x = 0; x < cm.nstates; ++x)
      if (target[x]) buf[x] = 1.0;
    u.swap(buf);
  }
  return u;
}

HittingTrials run_hitting_trials(const IsingModel& m, const ChainSpec& spec, SpinConfig start,
                                 const std::function<bool(SpinConfig)>& target, int steps,
                                 int trials, const RngStream& root) {
  require(trials >= 1 && steps >= 0, ErrKind::Validation,
          "hitting trials: need at least one trial and a nonnegative budget");
  HittingTrials out;
  out.trials = trials;
  out.hit_step.assign(trials, -1);
  for (int t = 0; t < trials; ++t) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(t));
    SpinConfig x = start;
    if (target(x)) {
      out.hit_step[t] = 0;
    } else {
      for (int s = 1; s <= steps; ++s) {
        x = chain_step(m, spec, x, rng);
        if (target(x)) {
          out.hit_step[t] = s;
          break;
        }
      }
    }
    if (out.hit_step[t] >= 0) ++out.hits;
  }
  return out;
}

}  // namespace gmlm
