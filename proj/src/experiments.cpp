#include "gmlm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

#include "gmlm/asymptotics.hpp"
#include "gmlm/io.hpp"
#include "gmlm/kernels.hpp"

namespace gmlm {

namespace {

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

std::string config_hash_line(const std::string& name, std::uint64_t seed,
                             const std::string& canonical) {
  const std::uint64_t h = fnv1a64(canonical.data(), canonical.size());
  return "# " + name + " seed=" + std::to_string(seed) + " config=" + hex64(h) + "\n";
}

double l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

}  // namespace

int resolve_jobs(int requested) {
  if (requested > 0) return std::min(requested, 1024);
  if (const char* env = std::getenv("GMLM_LAB_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 1024L));
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 16u));
}

void parallel_for(int jobs, std::size_t count, const std::function<void(std::size_t)>& task) {
  jobs = static_cast<int>(std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(count, 1)));
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// ---- recovery ---------------------------------------------------------------

namespace {

void validate_recovery(const RecoveryConfig& cfg) {
  cfg.model.validate();
  require(!cfg.ks.empty() && !cfg.sample_sizes.empty(), ErrKind::Validation,
          "recovery: ks and sample_sizes must be nonempty");
  for (std::size_t i = 0; i < cfg.ks.size(); ++i) {
    require(cfg.ks[i] >= 1 && cfg.ks[i] <= cfg.model.n, ErrKind::Validation,
            "recovery: k out of range");
    require(i == 0 || cfg.ks[i] > cfg.ks[i - 1], ErrKind::Validation,
            "recovery: ks must strictly increase");
  }
  for (std::size_t i = 0; i < cfg.sample_sizes.size(); ++i) {
    require(cfg.sample_sizes[i] >= 1, ErrKind::Validation, "recovery: sample size must be >= 1");
    require(i == 0 || cfg.sample_sizes[i] > cfg.sample_sizes[i - 1], ErrKind::Validation,
            "recovery: sample sizes must strictly increase");
  }
  require(cfg.trials >= 1, ErrKind::Validation, "recovery: trials must be >= 1");
  require(cfg.masks_per_sequence >= 1, ErrKind::Validation,
          "recovery: masks_per_sequence must be >= 1");
}

}  // namespace

RecoveryResult run_recovery(const RecoveryConfig& cfg, int jobs) {
  validate_recovery(cfg);
  const std::vector<double> theta_star = theta_from_model(cfg.model);
  const RngStream root(cfg.seed);
  const std::size_t per_trial = cfg.sample_sizes.size() * cfg.ks.size();
  RecoveryResult out;
  out.seed = cfg.seed;
  out.cells.assign(static_cast<std::size_t>(cfg.trials) * per_trial, RecoveryCell{});
  parallel_for(jobs, static_cast<std::size_t>(cfg.trials), [&](std::size_t trial) {
    const RngStream trial_stream = root.derive(trial);
    for (std::size_t gi = 0; gi < cfg.sample_sizes.size(); ++gi) {
      const int nsamp = cfg.sample_sizes[gi];
      const RngStream grid_stream = trial_stream.derive(gi);
      RngStream config_stream = grid_stream.derive(0);
      const RngStream mask_base = grid_stream.derive(1);
      const std::vector<SpinConfig> configs = exact_sample(cfg.model, config_stream, nsamp);
      for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki) {
        const int k = cfg.ks[ki];
        const MaskDistribution law = MaskDistribution::uniform_k(cfg.model.n, k);
        PairWeights pw;
        if (cfg.population_masks) {
          pw = population_pairs(configs, cfg.model.n, k);
        } else {
          MaskedDataset data;
          data.n = cfg.model.n;
          for (int s = 0; s < nsamp; ++s) {
            const RngStream seq_base = mask_base.derive(static_cast<std::uint64_t>(s));
            for (int r = 0; r < cfg.masks_per_sequence; ++r) {
              RngStream ms = seq_base.derive(static_cast<std::uint64_t>(r));
              data.seq_index.push_back(s);
              data.configs.push_back(configs[s]);
              data.masks.push_back(sample_mask(law, ms, configs[s]));
            }
          }
          pw = aggregate_pairs(data);
        }
        const FitResult fit = fit_mple(pw, law, cfg.fit);
        RecoveryCell cell;
        cell.trial = static_cast<int>(trial);
        cell.k = k;
        cell.sample_size = nsamp;
        cell.err = l2_diff(fit.theta, theta_star);
        cell.scaled_sq = nsamp * cell.err * cell.err;
        cell.iterations = fit.iterations;
        cell.converged = fit.converged;
        out.cells[trial * per_trial + gi * cfg.ks.size() + ki] = cell;
      }
    }
  });
  return out;
}

std::string recovery_csv(const RecoveryConfig& cfg, const RecoveryResult& r) {
  std::string canonical = "recovery|" + model_to_json(cfg.model) + "|ks=";
  for (int k : cfg.ks) canonical += std::to_string(k) + ",";
  canonical += "|sizes=";
  for (int s : cfg.sample_sizes) canonical += std::to_string(s) + ",";
  canonical += "|trials=" + std::to_string(cfg.trials) +
               "|mps=" + std::to_string(cfg.masks_per_sequence) +
               "|population=" + std::to_string(cfg.population_masks ? 1 : 0);
  std::string out = config_hash_line("recovery", r.seed, canonical);
  out += "trial,k,sample_size,err,scaled_sq_err,iterations,converged\n";
  for (const RecoveryCell& c : r.cells) {
    out += std::to_string(c.trial);
    out += ',';
    out += std::to_string(c.k);
    out += ',';
    out += std::to_string(c.sample_size);
    out += ',';
    out += format_double(c.err);
    out += ',';
    out += format_double(c.scaled_sq);
    out += ',';
    out += std::to_string(c.iterations);
    out += ',';
    out += c.converged ? '1' : '0';
    out += '\n';
  }
  return out;
}

double recovery_mean_scaled_sq(const RecoveryResult& r, int k, int sample_size) {
  double acc = 0.0;
  int count = 0;
  for (const RecoveryCell& c : r.cells)
    if (c.k == k && c.sample_size == sample_size) {
      acc += c.scaled_sq;
      ++count;
    }
  require(count > 0, ErrKind::Validation, "recovery aggregate: no cells for this (k, size)");
  return acc / count;
}

// ---- normality --------------------------------------------------------------

NormalityResult run_normality(const NormalityConfig& cfg, int jobs) {
  cfg.model.validate();
  require(cfg.k >= 1 && cfg.k <= cfg.model.n, ErrKind::Validation, "normality: k out of range");
  require(cfg.replicas >= 2 && cfg.sample_size >= 1, ErrKind::Validation,
          "normality: need >= 2 replicas and >= 1 sample");
  const std::vector<double> theta_star = theta_from_model(cfg.model);
  const int dim = theta_dim(cfg.model.n);
  const MaskDistribution law = MaskDistribution::uniform_k(cfg.model.n, cfg.k);
  const RngStream root(cfg.seed);
  std::vector<std::vector<double>> deltas(cfg.replicas);
  std::vector<std::uint8_t> converged(cfg.replicas, 0);
  parallel_for(jobs, static_cast<std::size_t>(cfg.replicas), [&](std::size_t rep) {
    const RngStream rep_stream = root.derive(rep);
    RngStream config_stream = rep_stream.derive(0);
    const RngStream mask_base = rep_stream.derive(1);
    const std::vector<SpinConfig> configs =
        exact_sample(cfg.model, config_stream, cfg.sample_size);
    MaskedDataset data;
    data.n = cfg.model.n;
    for (int s = 0; s < cfg.sample_size; ++s) {
      RngStream ms = mask_base.derive(static_cast<std::uint64_t>(s)).derive(0);
      data.seq_index.push_back(s);
      data.configs.push_back(configs[s]);
      data.masks.push_back(sample_mask(law, ms, configs[s]));
    }
    const FitResult fit = fit_mple(aggregate_pairs(data), law, cfg.fit);
    std::vector<double> d(dim);
    const double scale = std::sqrt(static_cast<double>(cfg.sample_size));
    for (int i = 0; i < dim; ++i) d[i] = scale * (fit.theta[i] - theta_star[i]);
    deltas[rep] = std::move(d);
    converged[rep] = fit.converged ? 1 : 0;
  });
  NormalityResult out;
  std::vector<double> mean(dim, 0.0);
  double sumsq = 0.0;
  for (int rep = 0; rep < cfg.replicas; ++rep) {
    kern::axpy(1.0, deltas[rep].data(), mean.data(), mean.size());
    sumsq += kern::dot(deltas[rep].data(), deltas[rep].data(), deltas[rep].size());
    out.converged_replicas += converged[rep];
  }
  kern::scal(1.0 / cfg.replicas, mean.data(), mean.size());
  out.empirical_trace =
      sumsq / cfg.replicas - kern::dot(mean.data(), mean.data(), mean.size());
  out.gamma_trace = asymptotic_covariance(cfg.model, law).trace();
  out.ratio = out.empirical_trace / out.gamma_trace;
  return out;
}

// ---- mode escape --------------------------------------------------------------

ModeEscapeResult run_mode_escape(const ModeEscapeConfig& cfg, int jobs) {
  const IsingModel model = build_clique_ising(cfg.params);
  require(cfg.trials >= 1, ErrKind::Validation, "mode escape: trials must be >= 1");
  ModeEscapeResult out;
  out.constants = mode_slow_constants(model, cfg.delta);
  long long steps = cfg.steps > 0 ? cfg.steps : out.constants.t_bound;
  require(steps <= 10'000'000, ErrKind::Capacity,
          "mode escape: step bound too large to simulate; pass an explicit budget");
  out.steps = static_cast<int>(steps);
  out.trials = cfg.trials;
  const std::uint32_t cmask = model.clique_mask();
  const auto start =
      static_cast<SpinConfig>((std::uint64_t{1} << model.n) - 1);  // all plus
  const RngStream root(cfg.seed);
  std::vector<int> hit_step(cfg.trials, -1);
  const ChainSpec spec = ChainSpec::independent_parallel();
  parallel_for(jobs, static_cast<std::size_t>(cfg.trials), [&](std::size_t t) {
    RngStream rng = root.derive(t);
    SpinConfig x = start;
    for (int s = 1; s <= out.steps; ++s) {
      x = chain_step(model, spec, x, rng);
      if (!in_mode(cmask, +1, x)) {
        hit_step[t] = s;
        break;
      }
    }
  });
  for (int s : hit_step)
    if (s >= 0) ++out.escapes;
  out.escape_fraction = static_cast<double>(out.escapes) / cfg.trials;
  return out;
}

// ---- separation ---------------------------------------------------------------

SeparationResult run_separation(const SeparationConfig& cfg, int jobs) {
  (void)jobs;  // both trial loops are cheap; kept sequential for simplicity
  require(cfg.delta > 0.0 && cfg.delta < 1.0, ErrKind::Validation,
          "separation: delta must lie in (0, 1)");
  require(cfg.big_m >= 1 && cfg.trials >= 1, ErrKind::Validation,
          "separation: M and trials must be >= 1");
  require(cfg.fast_steps >= 1 && cfg.slow_steps >= 1, ErrKind::Validation,
          "separation: step budgets must be >= 1");
  SeparationResult out;
  const int c =
      static_cast<int>(std::ceil(8.0 * (1.0 + std::log(4.0 * cfg.big_m / cfg.delta))));
  // The instance sits exactly on the premise thresholds, but the scales are
  // recovered from the stored model (fields sum to h_g over c sites, j0 is a
  // subtraction), which loses a few ulps. A relative bump keeps the recovered
  // scales strictly above the thresholds without affecting anything observable.
  const double slack = 1.0 + 1e-9;
  const double h_g = 0.5 * std::log(2.0 * (4.0 - cfg.delta) / cfg.delta) * slack;
  const double j0 = 0.5 * c * std::log(2.0) * slack;
  const double coupling = j0 + h_g;  // j0 = coupling - l1(fields) with clique-only fields
  const int n = c + 4;
  require(n <= 64, ErrKind::Capacity, "separation: instance exceeds 64 sites");
  std::vector<int> clique(c);
  for (int i = 0; i < c; ++i) clique[i] = i;
  std::vector<double> fields(n, 0.0);
  for (int i = 0; i < c; ++i) fields[i] = h_g / c;
  const CliqueSystem sys = make_clique_system(n, clique, coupling, fields);
  const CliqueScales scales = sys.scales();
  int k = c;
  while (k <= n && !check_large_k(n, c, k, cfg.delta).holds) ++k;
  require(k <= n, ErrKind::Numeric, "separation: no block size satisfies the premise");
  out.n = n;
  out.clique_size = c;
  out.k = k;
  out.h_g = scales.h_g;
  out.j0 = scales.j0;
  out.coupling = coupling;
  out.premises = check_strong_interactions(scales, cfg.big_m, cfg.delta);
  out.block_size = check_large_k(n, c, k, cfg.delta);
  out.c_fast = mode_fast_constant(scales, k);
  out.slow = mode_slow_constants(scales, cfg.delta);
  require(cfg.slow_steps <= out.slow.t_bound, ErrKind::Validation,
          "separation: slow budget exceeds the bound's validity window");
  out.trials = cfg.trials;
  out.fast_bound = 1.0 - std::pow(out.c_fast, cfg.fast_steps);
  out.slow_bound = 0.5 * cfg.delta;
  const RngStream root(cfg.seed);
  const WideHittingTrials fast = clique_hitting_trials(
      sys, true, k, WideConfig{0},
      [&](WideConfig x) { return clique_in_mode(sys, +1, x); }, cfg.fast_steps, cfg.trials,
      root.derive(0));
  out.fast_hits = fast.hits;
  const WideHittingTrials slow = clique_hitting_trials(
      sys, false, 0, sys.cmask,
      [&](WideConfig x) { return !clique_in_mode(sys, +1, x); }, cfg.slow_steps, cfg.trials,
      root.derive(1));
  out.slow_escapes = slow.hits;
  return out;
}

// ---- sampling figure ------------------------------------------------------------

namespace {

struct SamplingChain {
  std::string name;
  bool k_gibbs = false;
  int k = 0;
};

std::vector<SamplingChain> sampling_chains(const SamplingFigureConfig& cfg) {
  std::vector<SamplingChain> chains;
  for (int k : cfg.ks) chains.push_back({"kgibbs" + std::to_string(k), true, k});
  if (cfg.include_independent) chains.push_back({"independent", false, 0});
  return chains;
}

IsingModel sampling_model(const SamplingFigureConfig& cfg, double coupling) {
  CliqueParams p;
  p.n = cfg.n;
  p.clique = cfg.clique;
  p.coupling = coupling;
  p.fields.assign(cfg.n, 0.0);
  for (int i : cfg.clique) p.fields[i] = cfg.field;
  return build_clique_ising(p);
}

}  // namespace

SamplingFigureResult run_sampling_figure(const SamplingFigureConfig& cfg, int jobs) {
  require(!cfg.couplings.empty() && !cfg.ks.empty(), ErrKind::Validation,
          "sampling figure: couplings and ks must be nonempty");
  require(cfg.budget >= 1 && cfg.trials >= 1, ErrKind::Validation,
          "sampling figure: budget and trials must be >= 1");
  for (int k : cfg.ks)
    require(k >= 1 && k <= cfg.n, ErrKind::Validation, "sampling figure: k out of range");
  const std::vector<SamplingChain> chains = sampling_chains(cfg);
  std::vector<IsingModel> models;
  for (double coupling : cfg.couplings) models.push_back(sampling_model(cfg, coupling));
  const std::uint32_t cmask = models.front().clique_mask();
  const std::size_t cells =
      cfg.couplings.size() * chains.size() * static_cast<std::size_t>(cfg.trials);
  SamplingFigureResult out;
  out.seed = cfg.seed;
  out.cells.assign(cells, SamplingCell{});
  const RngStream root(cfg.seed);
  parallel_for(jobs, cells, [&](std::size_t ci) {
    const std::size_t trial = ci % cfg.trials;
    const std::size_t chain_i = (ci / cfg.trials) % chains.size();
    const std::size_t coup_i = ci / (cfg.trials * chains.size());
    const SamplingChain& chain = chains[chain_i];
    const IsingModel& model = models[coup_i];
    const ChainSpec spec = chain.k_gibbs ? ChainSpec::k_gibbs(chain.k)
                                         : ChainSpec::independent_parallel();
    RngStream rng = root.derive(ci);
    SpinConfig x = 0;  // all minus
    int hit = -1;
    for (int s = 1; s <= cfg.budget; ++s) {
      x = chain_step(model, spec, x, rng);
      if (in_mode(cmask, +1, x)) {
        hit = s;
        break;
      }
    }
    SamplingCell& cell = out.cells[ci];
    cell.coupling = cfg.couplings[coup_i];
    cell.chain = chain.name;
    cell.trial = static_cast<int>(trial);
    cell.hit_step = hit;
  });
  return out;
}

std::string sampling_csv(const SamplingFigureConfig& cfg, const SamplingFigureResult& r) {
  std::string canonical = "sampling|n=" + std::to_string(cfg.n) + "|clique=";
  for (int i : cfg.clique) canonical += std::to_string(i) + ",";
  canonical += "|field=" + format_double(cfg.field) + "|couplings=";
  for (double j : cfg.couplings) canonical += format_double(j) + ",";
  canonical += "|ks=";
  for (int k : cfg.ks) canonical += std::to_string(k) + ",";
  canonical += "|independent=" + std::to_string(cfg.include_independent ? 1 : 0) +
               "|budget=" + std::to_string(cfg.budget) +
               "|trials=" + std::to_string(cfg.trials);
  std::string out = config_hash_line("sampling", r.seed, canonical);
  out += "coupling,chain,trial,hit_step\n";
  for (const SamplingCell& c : r.cells) {
    out += format_double(c.coupling);
    out += ',';
    out += c.chain;
    out += ',';
    out += std::to_string(c.trial);
    out += ',';
    out += std::to_string(c.hit_step);
    out += '\n';
  }
  return out;
}

std::vector<SamplingAggregate> sampling_aggregate(const SamplingFigureConfig& cfg,
                                                  const SamplingFigureResult& r) {
  std::vector<SamplingAggregate> out;
  const std::vector<SamplingChain> chains = sampling_chains(cfg);
  const std::size_t per_group = static_cast<std::size_t>(cfg.trials);
  std::size_t ci = 0;
  for (double coupling : cfg.couplings) {
    for (const SamplingChain& chain : chains) {
      SamplingAggregate agg;
      agg.coupling = coupling;
      agg.chain = chain.name;
      agg.trials = cfg.trials;
      std::vector<int> steps;
      for (std::size_t t = 0; t < per_group; ++t, ++ci) {
        const SamplingCell& cell = r.cells[ci];
        if (cell.hit_step >= 0) {
          ++agg.hits;
          steps.push_back(cell.hit_step);
        }
      }
      if (steps.empty()) {
        agg.median_hit_step = std::numeric_limits<double>::infinity();
      } else {
        std::sort(steps.begin(), steps.end());
        const std::size_t mid = steps.size() / 2;
        agg.median_hit_step = steps.size() % 2 == 1
                                  ? steps[mid]
                                  : 0.5 * (steps[mid - 1] + steps[mid]);
      }
      out.push_back(std::move(agg));
    }
  }
  return out;
}

}  // namespace gmlm
