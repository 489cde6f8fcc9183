#include "gmlm/masking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "gmlm/kernels.hpp"
#include "json.hpp"

namespace gmlm {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return std::round(r);
}

std::uint32_t full_mask(int n) { return n == 32 ? ~0u : ((1u << n) - 1u); }

}  // namespace

MaskDistribution MaskDistribution::uniform_k(int n, int k) {
  MaskDistribution d;
  d.kind = MaskKind::UniformK;
  d.n = n;
  d.k = k;
  d.validate();
  return d;
}

MaskDistribution MaskDistribution::weighted(int n, std::vector<std::uint32_t> blocks,
                                            std::vector<double> probs) {
  MaskDistribution d;
  d.kind = MaskKind::Weighted;
  d.n = n;
  d.blocks = std::move(blocks);
  d.probs = std::move(probs);
  d.validate();
  return d;
}

MaskDistribution MaskDistribution::adaptive(int n, std::vector<std::uint32_t> blocks,
                                            std::vector<std::vector<double>> table) {
  MaskDistribution d;
  d.kind = MaskKind::Adaptive;
  d.n = n;
  d.blocks = std::move(blocks);
  d.table = std::move(table);
  d.validate();
  return d;
}

void MaskDistribution::validate() const {
  require(n >= 1 && n <= 20, ErrKind::Capacity, "mask law: n must be in [1, 20]");
  if (kind == MaskKind::UniformK) {
    require(k >= 1 && k <= n, ErrKind::Validation, "mask law: k must be in [1, n]");
    return;
  }
  require(!blocks.empty(), ErrKind::Validation, "mask law: needs at least one block");
  std::uint32_t cover = 0;
  for (std::uint32_t b : blocks) {
    require(b != 0, ErrKind::Validation, "mask law: empty block");
    require((b >> n) == 0, ErrKind::Validation, "mask law: block outside [0, n)");
    cover |= b;
  }
  require(cover == full_mask(n), ErrKind::Validation,
          "mask law: blocks must jointly cover all coordinates");
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j)
      require(blocks[i] != blocks[j], ErrKind::Validation, "mask law: duplicate block");
  if (kind == MaskKind::Weighted) {
    require(probs.size() == blocks.size(), ErrKind::Validation,
            "mask law: probs size must match blocks");
    FiniteDistribution f{probs};
    f.validate();
    return;
  }
  // Adaptive
  require(table.size() == (std::size_t{1} << n), ErrKind::Validation,
          "mask law: adaptive table needs one row per configuration");
  for (const auto& row : table) {
    require(row.size() == blocks.size(), ErrKind::Validation,
            "mask law: adaptive row size must match blocks");
    FiniteDistribution f{row};
    f.validate();
  }
}

int MaskDistribution::block_index(std::uint32_t block) const {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i] == block) return static_cast<int>(i);
  return -1;
}

double MaskDistribution::block_prob(std::uint32_t block, SpinConfig x) const {
  switch (kind) {
    case MaskKind::UniformK:
      if (std::popcount(block) != k || (block >> n) != 0 || block == 0) return 0.0;
      return 1.0 / binom(n, k);
    case MaskKind::Weighted: {
      const int idx = block_index(block);
      return idx < 0 ? 0.0 : probs[idx];
    }
    case MaskKind::Adaptive: {
      const int idx = block_index(block);
      return idx < 0 ? 0.0 : table[x][idx];
    }
  }
  return 0.0;
}

std::uint32_t sample_mask(const MaskDistribution& d, RngStream& rng, SpinConfig x) {
  switch (d.kind) {
    case MaskKind::UniformK: {
      int perm[32];
      std::iota(perm, perm + d.n, 0);
      std::uint32_t mask = 0;
      for (int t = 0; t < d.k; ++t) {
        const int j = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(d.n - t)));
        std::swap(perm[t], perm[j]);
        mask |= 1u << perm[t];
      }
      return mask;
    }
    case MaskKind::Weighted: {
      FiniteDistribution f{d.probs};
      return d.blocks[f.sample(rng)];
    }
    case MaskKind::Adaptive: {
      FiniteDistribution f{d.table[x]};
      return d.blocks[f.sample(rng)];
    }
  }
  fail_validation("sample_mask: unknown mask law");
}

void MaskedDataset::validate() const {
  require(n >= 1 && n <= 20, ErrKind::Capacity, "dataset: n must be in [1, 20]");
  require(configs.size() == masks.size() && configs.size() == seq_index.size(),
          ErrKind::Validation, "dataset: column lengths differ");
  require(!configs.empty(), ErrKind::Validation, "dataset: empty");
  for (std::size_t r = 0; r < configs.size(); ++r) {
    require((configs[r] >> n) == 0, ErrKind::Validation, "dataset: config outside [0, 2^n)");
    require(masks[r] != 0 && (masks[r] >> n) == 0, ErrKind::Validation,
            "dataset: mask must be a nonempty subset of [0, n)");
  }
}

std::string MaskedDataset::to_csv() const {
  validate();
  std::string out = "seq_index,config_bits,mask_bits\n";
  for (std::size_t r = 0; r < configs.size(); ++r) {
    out += std::to_string(seq_index[r]);
    out += ',';
    out += std::to_string(configs[r]);
    out += ',';
    out += std::to_string(masks[r]);
    out += '\n';
  }
  return out;
}

MaskedDataset MaskedDataset::from_csv(int n, const std::string& text) {
  MaskedDataset d;
  d.n = n;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.find("seq_index") != std::string::npos) continue;
    }
    std::istringstream ls(line);
    std::string cell;
    long vals[3];
    for (int c = 0; c < 3; ++c) {
      require(static_cast<bool>(std::getline(ls, cell, ',')), ErrKind::Validation,
              "dataset csv: expected 3 columns");
      try {
        vals[c] = std::stol(cell);
      } catch (const std::exception&) {
        fail_validation("dataset csv: non-integer cell '" + cell + "'");
      }
    }
    d.seq_index.push_back(static_cast<int>(vals[0]));
    d.configs.push_back(static_cast<SpinConfig>(vals[1]));
    d.masks.push_back(static_cast<std::uint32_t>(vals[2]));
  }
  d.validate();
  return d;
}

PairWeights aggregate_pairs(const MaskedDataset& data) {
  data.validate();
  std::map<std::uint64_t, double> acc;
  const double w = 1.0 / static_cast<double>(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r)
    acc[(static_cast<std::uint64_t>(data.masks[r]) << 32) | data.configs[r]] += w;
  PairWeights pw;
  pw.n = data.n;
  for (const auto& [key, weight] : acc) {
    pw.masks.push_back(static_cast<std::uint32_t>(key >> 32));
    pw.configs.push_back(static_cast<SpinConfig>(key & 0xFFFFFFFFu));
    pw.weights.push_back(weight);
  }
  return pw;
}

PairWeights population_pairs(const std::vector<SpinConfig>& configs, int n, int k) {
  require(!configs.empty(), ErrKind::Validation, "population_pairs: empty sample");
  require(n >= 1 && n <= 20, ErrKind::Capacity, "population_pairs: n must be in [1, 20]");
  require(k >= 1 && k <= n, ErrKind::Validation, "population_pairs: k out of range");
  const double nblocks = binom(n, k);
  require(nblocks <= 4096.0, ErrKind::Capacity,
          "population_pairs: C(n,k) exceeds 4096; use recorded masks");
  std::map<SpinConfig, double> counts;
  for (SpinConfig x : configs) {
    require((x >> n) == 0, ErrKind::Validation, "population_pairs: config outside [0, 2^n)");
    counts[x] += 1.0;
  }
  const auto blocks = all_blocks_of_size(n, k);
  PairWeights pw;
  pw.n = n;
  const double total = static_cast<double>(configs.size());
  for (std::uint32_t b : blocks) {
    for (const auto& [x, cnt] : counts) {
      pw.masks.push_back(b);
      pw.configs.push_back(x);
      pw.weights.push_back(cnt / total / nblocks);
    }
  }
  return pw;
}

FiniteDistribution adaptive_completion_dist(const FiniteDistribution& joint,
                                            const MaskDistribution& d, SpinConfig x,
                                            std::uint32_t completion_set,
                                            std::uint32_t mask_block) {
  require(completion_set != 0, ErrKind::Validation, "adaptive conditional: empty completion set");
  require(joint.size() == (std::size_t{1} << d.n), ErrKind::Validation,
          "adaptive conditional: joint size mismatch");
  const SpinConfig rest = x & ~completion_set;
  const int k = std::popcount(completion_set);
  FiniteDistribution out;
  out.p.resize(std::size_t{1} << k);
  double denom = 0.0;
  for (std::size_t a = 0; a < out.p.size(); ++a) {
    const SpinConfig y = rest | deposit_bits(static_cast<std::uint32_t>(a), completion_set);
    out.p[a] = joint.p[y] * d.block_prob(mask_block, y);
    denom += out.p[a];
  }
  require(denom > 0.0, ErrKind::Validation,
          "adaptive conditional: zero total mass for this (rest, block)");
  for (double& v : out.p) v /= denom;
  return out;
}

FiniteDistribution adaptive_conditional(const FiniteDistribution& joint,
                                        const MaskDistribution& d, SpinConfig x,
                                        std::uint32_t block) {
  return adaptive_completion_dist(joint, d, x, block, block);
}

FiniteDistribution adaptive_conditional_observed(const FiniteDistribution& joint,
                                                 const MaskDistribution& d, SpinConfig x,
                                                 std::uint32_t block) {
  const std::uint32_t complement = full_mask(d.n) & ~block;
  require(complement != 0, ErrKind::Validation,
          "adaptive_conditional_observed: block covers all coordinates");
  return adaptive_completion_dist(joint, d, x, complement, block);
}

FiniteDistribution masked_conditional(const IsingModel& m, const MaskDistribution& d,
                                      SpinConfig x, std::uint32_t block) {
  if (d.kind != MaskKind::Adaptive) return block_conditional(m, x, block);
  const int bi = d.block_index(block);
  require(bi >= 0, ErrKind::Validation, "masked_conditional: block not in the adaptive list");
  const SpinConfig rest = x & ~block;
  const int k = std::popcount(block);
  std::vector<double> lw(std::size_t{1} << k);
  LogSumExp acc;
  for (std::size_t a = 0; a < lw.size(); ++a) {
    const SpinConfig y = rest | deposit_bits(static_cast<std::uint32_t>(a), block);
    const double pk = d.table[y][bi];
    lw[a] = pk > 0.0 ? log_weight(m, y) + std::log(pk)
                     : -std::numeric_limits<double>::infinity();
    acc.add(lw[a]);
  }
  const double lz = acc.value();
  require(std::isfinite(lz), ErrKind::Validation,
          "masked_conditional: zero total mass for this (rest, block)");
  FiniteDistribution out;
  out.p.resize(lw.size());
  for (std::size_t a = 0; a < lw.size(); ++a) out.p[a] = std::exp(lw[a] - lz);
  return out;
}

double marginalization_identity_check(const FiniteDistribution& joint,
                                      const MaskDistribution& d) {
  require(d.kind != MaskKind::UniformK, ErrKind::Validation,
          "marginalization check: needs an explicit block list");
  require(joint.size() == (std::size_t{1} << d.n), ErrKind::Validation,
          "marginalization check: joint size mismatch");
  double worst = 0.0;
  for (std::size_t xi = 0; xi < joint.size(); ++xi) {
    const auto x = static_cast<SpinConfig>(xi);
    for (std::uint32_t block : d.blocks) {
      const SpinConfig rest = x & ~block;
      const int k = std::popcount(block);
      // p(rest) and per-block joint mass over completions of `block`.
      double p_rest = 0.0;
      std::vector<double> mass_kprime(d.blocks.size(), 0.0);
      for (std::size_t a = 0; a < (std::size_t{1} << k); ++a) {
        const SpinConfig y = rest | deposit_bits(static_cast<std::uint32_t>(a), block);
        p_rest += joint.p[y];
        for (std::size_t bi = 0; bi < d.blocks.size(); ++bi)
          mass_kprime[bi] += joint.p[y] * d.block_prob(d.blocks[bi], y);
      }
      if (p_rest == 0.0) continue;
      const double lhs = joint.p[x] / p_rest;
      const std::uint32_t a_obs = extract_bits(x, block);
      double rhs = 0.0;
      for (std::size_t bi = 0; bi < d.blocks.size(); ++bi) {
        const double w = mass_kprime[bi] / p_rest;  // P(K' | x_rest)
        if (w == 0.0) continue;
        FiniteDistribution cond =
            adaptive_completion_dist(joint, d, x, block, d.blocks[bi]);
        rhs += w * cond.p[a_obs];
      }
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

namespace {

// Shared evaluation core. Rows are grouped by mask so per-mask bookkeeping
// (involved components, adaptive block index) is done once. A component is
// involved iff its value can change when the masked sites are resampled.
struct MaskGroup {
  std::uint32_t mask = 0;
  int k = 0;
  int block_idx = -1;  // adaptive only
  std::vector<int> involved;                  // theta indices
  std::vector<std::pair<int, int>> members;   // (i,-1) site or (i,j) pair
  std::vector<std::size_t> rows;
};

struct Evaluator {
  int n = 0;
  int dim = 0;
  const PairWeights* pw = nullptr;
  const MaskDistribution* d = nullptr;
  bool adaptive = false;
  std::vector<MaskGroup> groups;

  Evaluator(const PairWeights& pairs, const MaskDistribution& law) {
    n = pairs.n;
    dim = theta_dim(n);
    pw = &pairs;
    d = &law;
    require(law.n == n, ErrKind::Validation, "mask law dimension differs from data");
    adaptive = law.kind == MaskKind::Adaptive;
    std::map<std::uint32_t, std::vector<std::size_t>> by_mask;
    for (std::size_t r = 0; r < pairs.configs.size(); ++r) {
      require(pairs.masks[r] != 0 && (pairs.masks[r] >> n) == 0, ErrKind::Validation,
              "pair weights: bad mask");
      by_mask[pairs.masks[r]].push_back(r);
    }
    for (auto& [mask, rows] : by_mask) {
      MaskGroup g;
      g.mask = mask;
      g.k = std::popcount(mask);
      g.rows = std::move(rows);
      if (adaptive) {
        g.block_idx = law.block_index(mask);
        require(g.block_idx >= 0, ErrKind::Validation,
                "pair weights: mask not in the adaptive block list");
      }
      for (int i = 0; i < n; ++i)
        if ((mask >> i) & 1u) {
          g.involved.push_back(i);
          g.members.emplace_back(i, -1);
        }
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (((mask >> i) & 1u) || ((mask >> j) & 1u)) {
            g.involved.push_back(pair_index(n, i, j));
            g.members.emplace_back(i, j);
          }
      groups.push_back(std::move(g));
    }
  }

  // loss only, or loss plus gradient, or loss plus gradient plus hessian.
  double evaluate(const std::vector<double>& theta, std::vector<double>* grad,
                  SymMatrix* hess) const {
    const IsingModel model = model_from_theta(n, theta);
    if (grad) std::fill(grad->begin(), grad->end(), 0.0);
    if (hess) std::fill(hess->a.begin(), hess->a.end(), 0.0);
    double loss = 0.0;
    std::vector<double> lw, q, phi_mean;
    std::vector<double> phi_all;  // per completion, involved components only
    for (const MaskGroup& g : groups) {
      const std::size_t na = std::size_t{1} << g.k;
      const std::size_t ninv = g.involved.size();
      lw.resize(na);
      q.resize(na);
      for (std::size_t r : g.rows) {
        const SpinConfig x = (*pw).configs[r];
        const double w = (*pw).weights[r];
        const SpinConfig rest = x & ~g.mask;
        for (std::size_t a = 0; a < na; ++a) {
          const SpinConfig y = rest | deposit_bits(static_cast<std::uint32_t>(a), g.mask);
          lw[a] = log_weight(model, y);
          if (adaptive) {
            const double pk = d->table[y][g.block_idx];
            lw[a] = pk > 0.0 ? lw[a] + std::log(pk)
                             : -std::numeric_limits<double>::infinity();
          }
        }
        LogSumExp acc;
        for (double v : lw) acc.add(v);
        const double lz = acc.value();
        const std::uint32_t a_obs = extract_bits(x, g.mask);
        require(std::isfinite(lw[a_obs]), ErrKind::Validation,
                "mple loss: observed pair has zero mask probability");
        loss += w * (lz - lw[a_obs]);
        if (!grad && !hess) continue;

        for (std::size_t a = 0; a < na; ++a) q[a] = std::exp(lw[a] - lz);
        phi_all.assign(na * ninv, 0.0);
        phi_mean.assign(ninv, 0.0);
        for (std::size_t a = 0; a < na; ++a) {
          const SpinConfig y = rest | deposit_bits(static_cast<std::uint32_t>(a), g.mask);
          double* row = &phi_all[a * ninv];
          for (std::size_t c = 0; c < ninv; ++c) {
            const auto [i, j] = g.members[c];
            row[c] = j < 0 ? spin(y, i) : spin(y, i) * spin(y, j);
          }
        }
        for (std::size_t a = 0; a < na; ++a)
          kern::axpy(q[a], &phi_all[a * ninv], phi_mean.data(), ninv);
        if (grad) {
          const double* obs_row = &phi_all[a_obs * ninv];
          for (std::size_t c = 0; c < ninv; ++c)
            (*grad)[g.involved[c]] += w * (phi_mean[c] - obs_row[c]);
        }
        if (hess) {
          for (std::size_t c = 0; c < ninv; ++c) {
            for (std::size_t e = c; e < ninv; ++e) {
              double m2 = 0.0;
              for (std::size_t a = 0; a < na; ++a)
                m2 += q[a] * phi_all[a * ninv + c] * phi_all[a * ninv + e];
              const double cov = m2 - phi_mean[c] * phi_mean[e];
              hess->add_sym(g.involved[c], g.involved[e], w * cov);
            }
          }
        }
      }
    }
    return loss;
  }
};

}  // namespace

double mple_loss(const std::vector<double>& theta, const PairWeights& pw,
                 const MaskDistribution& d) {
  return Evaluator(pw, d).evaluate(theta, nullptr, nullptr);
}

std::vector<double> mple_gradient(const std::vector<double>& theta, const PairWeights& pw,
                                  const MaskDistribution& d) {
  std::vector<double> g(theta.size(), 0.0);
  Evaluator(pw, d).evaluate(theta, &g, nullptr);
  return g;
}

SymMatrix loss_hessian(const std::vector<double>& theta, const PairWeights& pw,
                       const MaskDistribution& d) {
  Evaluator ev(pw, d);
  std::vector<double> g(theta.size(), 0.0);
  SymMatrix h(ev.dim);
  ev.evaluate(theta, &g, &h);
  return h;
}

double mple_loss(const std::vector<double>& theta, const MaskedDataset& data,
                 const MaskDistribution& d) {
  return mple_loss(theta, aggregate_pairs(data), d);
}

std::vector<double> mple_gradient(const std::vector<double>& theta, const MaskedDataset& data,
                                  const MaskDistribution& d) {
  return mple_gradient(theta, aggregate_pairs(data), d);
}

SymMatrix loss_hessian(const std::vector<double>& theta, const MaskedDataset& data,
                       const MaskDistribution& d) {
  return loss_hessian(theta, aggregate_pairs(data), d);
}

namespace {

// Direction -H~^{-1} g through the eigensystem of the curvature, with small
// eigenvalues floored so flat directions cannot blow the step up. The loss is
// convex, so the floored direction is always a descent direction.
void damped_newton_direction(const SymMatrix& hess, const std::vector<double>& grad,
                             std::vector<double>& dir) {
  const int dim = hess.dim;
  const EigenDecomposition eig = jacobi_eigen(hess);
  const double floor = std::max(1e-10, 1e-12 * std::max(eig.values.front(), 0.0));
  std::fill(dir.begin(), dir.end(), 0.0);
  for (int j = 0; j < dim; ++j) {
    double coef = 0.0;
    for (int i = 0; i < dim; ++i) coef += eig.vectors[static_cast<std::size_t>(i) * dim + j] * grad[i];
    coef /= std::max(eig.values[static_cast<std::size_t>(j)], floor);
    for (int i = 0; i < dim; ++i)
      dir[static_cast<std::size_t>(i)] -= coef * eig.vectors[static_cast<std::size_t>(i) * dim + j];
  }
}

}  // namespace

FitResult fit_mple(const PairWeights& pw, const MaskDistribution& d, const FitOptions& opts) {
  require(opts.step > 0.0 && opts.max_iters >= 1 && opts.grad_tol > 0.0, ErrKind::Validation,
          "fit options: step, max_iters, grad_tol must be positive");
  Evaluator ev(pw, d);
  FitResult res;
  res.theta.assign(ev.dim, 0.0);
  std::vector<double> grad(ev.dim, 0.0);
  std::vector<double> dir(ev.dim, 0.0);
  std::vector<double> trial(ev.dim, 0.0);
  SymMatrix hess(ev.dim);
  double loss = ev.evaluate(res.theta, &grad, &hess);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const double gn = std::sqrt(kern::dot(grad.data(), grad.data(), grad.size()));
    if (gn <= opts.grad_tol) {
      res.converged = true;
      break;
    }
    damped_newton_direction(hess, grad, dir);
    const double slope = kern::dot(grad.data(), dir.data(), dir.size());
    bool accepted = false;
    double trial_loss = 0.0;
    double step = 1.0;
    for (int halve = 0; halve <= opts.max_halvings; ++halve) {
      for (int i = 0; i < ev.dim; ++i) trial[i] = res.theta[i] + step * dir[i];
      trial_loss = ev.evaluate(trial, nullptr, nullptr);
      if (trial_loss <= loss + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // plain gradient fallback at the configured step
      step = opts.step;
      for (int halve = 0; halve <= opts.max_halvings; ++halve) {
        for (int i = 0; i < ev.dim; ++i) trial[i] = res.theta[i] - step * grad[i];
        trial_loss = ev.evaluate(trial, nullptr, nullptr);
        if (trial_loss <= loss) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
    }
    res.iterations = iter + 1;
    if (!accepted) break;  // loss at its numerical floor
    res.theta.swap(trial);
    loss = ev.evaluate(res.theta, &grad, &hess);
  }
  res.loss = loss;
  res.grad_norm = std::sqrt(kern::dot(grad.data(), grad.data(), grad.size()));
  res.converged = res.converged || res.grad_norm <= opts.grad_tol;
  return res;
}

FitResult fit_mple(const MaskedDataset& data, const MaskDistribution& d, const FitOptions& opts) {
  return fit_mple(aggregate_pairs(data), d, opts);
}

std::string MaskDistribution::to_json() const {
  validate();
  nlohmann::json j;
  j["n"] = n;
  switch (kind) {
    case MaskKind::UniformK:
      j["type"] = "uniform_k";
      j["k"] = k;
      break;
    case MaskKind::Weighted: {
      j["type"] = "weighted";
      auto arr = nlohmann::json::array();
      for (std::uint32_t b : blocks) arr.push_back(mask_members(b));
      j["blocks"] = arr;
      j["probs"] = probs;
      break;
    }
    case MaskKind::Adaptive: {
      j["type"] = "adaptive";
      auto arr = nlohmann::json::array();
      for (std::uint32_t b : blocks) arr.push_back(mask_members(b));
      j["blocks"] = arr;
      j["table"] = table;
      break;
    }
  }
  return j.dump(2) + "\n";
}

MaskDistribution MaskDistribution::from_json(int expected_n, const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail_validation(std::string("mask law json: ") + e.what());
  }
  MaskDistribution d;
  try {
    d.n = j.at("n").get<int>();
    const std::string type = j.at("type").get<std::string>();
    auto parse_blocks = [&]() {
      for (const auto& b : j.at("blocks")) {
        std::uint32_t mask = 0;
        for (const auto& site : b) mask |= 1u << site.get<int>();
        d.blocks.push_back(mask);
      }
    };
    if (type == "uniform_k") {
      d.kind = MaskKind::UniformK;
      d.k = j.at("k").get<int>();
    } else if (type == "weighted") {
      d.kind = MaskKind::Weighted;
      parse_blocks();
      d.probs = j.at("probs").get<std::vector<double>>();
    } else if (type == "adaptive") {
      d.kind = MaskKind::Adaptive;
      parse_blocks();
      d.table = j.at("table").get<std::vector<std::vector<double>>>();
    } else {
      fail_validation("mask law json: unknown type '" + type + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    fail_validation(std::string("mask law json: ") + e.what());
  }
  if (expected_n > 0)
    require(d.n == expected_n, ErrKind::Validation, "mask law json: n mismatch with model");
  d.validate();
  return d;
}

std::string FitResult::to_json() const {
  nlohmann::json j;
  j["theta"] = theta;
  j["loss"] = loss;
  j["grad_norm"] = grad_norm;
  j["iterations"] = iterations;
  j["converged"] = converged;
  return j.dump(2) + "\n";
}

}  // namespace gmlm
