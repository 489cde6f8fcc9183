#include "gmlm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gmlm/asymptotics.hpp"
#include "gmlm/chains.hpp"
#include "gmlm/errors.hpp"
#include "gmlm/experiments.hpp"
#include "gmlm/io.hpp"
#include "gmlm/verify.hpp"

namespace gmlm {
namespace {

using nlohmann::json;

json report_json(const AssumptionReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"ok", c.ok}});
  return {{"assumption", r.assumption},
          {"holds", r.holds},
          {"checks", checks},
          {"values", r.values}};
}

json mode_ordering_json(const ModeOrderingReport& r) {
  return {{"ordered", r.ordered},
          {"margin_plus_over_minus", r.margin_plus_over_minus},
          {"margin_minus_over_rest", std::isinf(r.margin_minus_over_rest)
                                         ? json()
                                         : json(r.margin_minus_over_rest)},
          {"bijection_max_dev", r.bijection_max_dev},
          {"h_g", r.h_g},
          {"j0", r.j0}};
}

json poincare_json(const PoincareResult& p) {
  return {{"constant", p.infinite ? json() : json(p.c)},
          {"lambda2", p.lambda2},
          {"infinite", p.infinite},
          {"reversibility_residual", p.reversibility_residual}};
}

json slow_json(const ModeSlowConstants& s) {
  return {{"c_stuck", s.c_stuck},
          {"t_bound", s.t_bound},
          {"escape_prob_bound", s.escape_prob_bound}};
}

void emit(const json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty())
    out << j.dump(2) << "\n";
  else
    write_file(out_path, j.dump(2) + "\n");
}

IsingModel load_model(const std::string& path) { return model_from_json(read_file(path)); }

MaskDistribution resolve_law(const IsingModel& m, int k, const std::string& law_path) {
  if (!law_path.empty()) {
    require(k <= 0, ErrKind::Validation, "give either --k or --law, not both");
    return MaskDistribution::from_json(m.n, read_file(law_path));
  }
  require(k >= 1, ErrKind::Validation, "a mask law is needed: give --k or --law");
  return MaskDistribution::uniform_k(m.n, k);
}

ChainSpec matching_chain(const MaskDistribution& d) {
  switch (d.kind) {
    case MaskKind::UniformK:
      return ChainSpec::k_gibbs(d.k);
    case MaskKind::Weighted:
      return ChainSpec::weighted_block(d);
    default:
      return ChainSpec::adaptive_block(d);
  }
}

double l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// ---- model ------------------------------------------------------------------

struct ModelArgs {
  int n = 0;
  std::vector<int> clique;
  double coupling = 0.0;
  double clique_field = 0.0;
  double outside_field = 0.0;
  std::string from;
  std::string out_path;
  bool check = false;
  int k = 0;
  int big_m = 5;
  double delta = 0.5;
};

int cmd_model(const ModelArgs& a, std::ostream& out) {
  IsingModel m;
  if (!a.from.empty()) {
    m = load_model(a.from);
  } else {
    require(a.n >= 1, ErrKind::Validation, "model: --n is required unless --from is given");
    require(!a.clique.empty(), ErrKind::Validation,
            "model: --clique is required unless --from is given");
    CliqueParams p;
    p.n = a.n;
    p.clique = a.clique;
    std::sort(p.clique.begin(), p.clique.end());
    p.coupling = a.coupling;
    p.fields.assign(static_cast<std::size_t>(a.n), a.outside_field);
    for (int i : p.clique) {
      require(i >= 0 && i < a.n, ErrKind::Validation, "model: clique site out of range");
      p.fields[static_cast<std::size_t>(i)] = a.clique_field;
    }
    m = build_clique_ising(p);
  }
  const std::string model_text = model_to_json(m);
  json j;
  if (a.out_path.empty())
    j["model"] = json::parse(model_text);
  else
    write_file(a.out_path, model_text + "\n");
  if (a.check) {
    const CliqueScales v = clique_scales(m);
    json checks;
    checks["scales"] = {{"n", v.n},       {"clique_size", v.c}, {"coupling", v.coupling},
                        {"h_g", v.h_g},   {"h_out", v.h_out},   {"h_l1", v.h_l1},
                        {"j0", v.j0}};
    checks["strongly_ferromagnetic"] = report_json(check_strongly_ferromagnetic(v));
    checks["strong_interactions"] = report_json(check_strong_interactions(v, a.big_m, a.delta));
    if (a.k >= 1) {
      checks["large_k"] = report_json(check_large_k(m.n, v.c, a.k, a.delta));
      checks["fast_constant"] = mode_fast_constant(v, a.k);
    }
    checks["slow"] = slow_json(mode_slow_constants(v, a.delta));
    if (m.n <= 16) checks["mode_ordering"] = mode_ordering_json(verify_mode_ordering(m));
    j["checks"] = checks;
  }
  if (!j.empty())
    out << j.dump(2) << "\n";
  else
    out << "wrote " << a.out_path << "\n";
  return 0;
}

// ---- estimate ---------------------------------------------------------------

struct EstimateArgs {
  std::string model_path;
  std::string data_path;
  int synthesize = 0;
  int k = 0;
  std::string law_path;
  int masks_per_sequence = 1;
  bool population = false;
  std::string out_path;
  std::string save_data;
  FitOptions fit;
};

int cmd_estimate(const EstimateArgs& a, std::uint64_t seed, std::ostream& out) {
  const IsingModel m = load_model(a.model_path);
  const MaskDistribution d = resolve_law(m, a.k, a.law_path);
  require(a.data_path.empty() != (a.synthesize == 0), ErrKind::Validation,
          "estimate: give exactly one of --data or --synthesize");

  MaskedDataset data;
  if (!a.data_path.empty()) {
    data = MaskedDataset::from_csv(m.n, read_file(a.data_path));
  } else {
    require(a.masks_per_sequence >= 1, ErrKind::Validation,
            "estimate: --masks-per-sequence must be >= 1");
    const RngStream root(seed);
    RngStream config_stream = root.derive(0);
    const RngStream mask_base = root.derive(1);
    const std::vector<SpinConfig> configs = exact_sample(m, config_stream, a.synthesize);
    data.n = m.n;
    for (std::size_t s = 0; s < configs.size(); ++s) {
      for (int rep = 0; rep < a.masks_per_sequence; ++rep) {
        RngStream mask_stream =
            mask_base.derive(static_cast<std::uint64_t>(s)).derive(static_cast<std::uint64_t>(rep));
        data.seq_index.push_back(static_cast<int>(s));
        data.configs.push_back(configs[s]);
        data.masks.push_back(sample_mask(d, mask_stream, configs[s]));
      }
    }
  }
  data.validate();
  if (!a.save_data.empty()) write_file(a.save_data, data.to_csv());

  FitResult fit;
  if (a.population) {
    require(d.kind == MaskKind::UniformK, ErrKind::Validation,
            "estimate: --population needs a uniform size-k law (--k)");
    fit = fit_mple(population_pairs(data.configs, m.n, d.k), d, a.fit);
  } else {
    fit = fit_mple(data, d, a.fit);
  }

  json j;
  j["fit"] = json::parse(fit.to_json());
  j["rows"] = data.rows();
  j["param_error_vs_model"] = l2_diff(fit.theta, theta_from_model(m));
  emit(j, a.out_path, out);
  return 0;
}

// ---- asymptotics --------------------------------------------------------------

struct AsymArgs {
  std::string model_path;
  int k = 0;
  std::string law_path;
  std::vector<int> monotone;
  bool variance_bound = false;
  std::string out_path;
};

int cmd_asymptotics(const AsymArgs& a, std::ostream& out) {
  const IsingModel m = load_model(a.model_path);
  const MaskDistribution d = resolve_law(m, a.k, a.law_path);
  json j;
  const InformationEqualityReport ie = check_information_equality(m, d, 1e-10);
  j["information_equality"] = {
      {"rel_gap", ie.rel_gap}, {"mean_grad_norm", ie.mean_grad_norm}, {"ok", ie.ok}};
  const SymMatrix fisher = fisher_information(m);
  const SymMatrix gamma = asymptotic_covariance(m, d);
  j["gamma_trace"] = gamma.trace();
  j["inverse_fisher_trace"] = invert_spd(fisher).trace();
  if (!a.monotone.empty()) {
    const MonotonicityReport rep = check_gamma_monotone(m, a.monotone, 1e-8);
    j["monotonicity"] = {{"ks", rep.ks},
                         {"traces", rep.traces},
                         {"psd_gaps", rep.psd_gaps},
                         {"traces_decreasing", rep.traces_decreasing},
                         {"ok", rep.ok}};
  }
  if (a.variance_bound) {
    const PoincareResult pc = poincare_constant(transition_matrix(m, matching_chain(d)));
    const VarianceBoundReport rep = check_variance_bound(gamma, fisher, pc.c, 1e-8);
    j["variance_bound"] = {{"chain_spectrum", poincare_json(pc)},
                           {"psd_gap", rep.psd_gap},
                           {"infinite_c", rep.infinite_c},
                           {"ok", rep.ok}};
  }
  emit(j, a.out_path, out);
  return 0;
}

// ---- chain --------------------------------------------------------------------

struct ChainArgs {
  std::string model_path;
  std::string kind = "kgibbs";
  int k = 1;
  std::string law_path;
  bool spectral = false;
  bool pair = false;
  std::string target;
  int steps = 0;
  int trials = 0;
  std::string start = "all-minus";
  bool exact = false;
  std::string out_path;
};

SpinConfig parse_start(const std::string& s, int n) {
  if (s == "zero" || s == "all-minus") return 0;
  if (s == "all-plus") return static_cast<SpinConfig>((std::uint64_t{1} << n) - 1);
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &used);
  } catch (const std::exception&) {
    fail_validation("chain: --start must be all-minus, all-plus, zero, or a config integer");
  }
  require(used == s.size(), ErrKind::Validation, "chain: malformed --start value");
  require(v < (std::uint64_t{1} << n), ErrKind::Validation, "chain: --start config out of range");
  return static_cast<SpinConfig>(v);
}

int cmd_chain(const ChainArgs& a, std::uint64_t seed, std::ostream& out) {
  require(a.spectral || !a.target.empty(), ErrKind::Validation,
          "chain: nothing to do; give --spectral or --target");
  const IsingModel m = load_model(a.model_path);
  ChainSpec spec;
  MaskDistribution law;
  if (a.kind == "kgibbs") {
    spec = ChainSpec::k_gibbs(a.k);
  } else if (a.kind == "independent") {
    spec = ChainSpec::independent_parallel();
  } else {
    require(!a.law_path.empty(), ErrKind::Validation,
            "chain: --law is required for weighted and adaptive chains");
    law = MaskDistribution::from_json(m.n, read_file(a.law_path));
    spec = (a.kind == "weighted") ? ChainSpec::weighted_block(law) : ChainSpec::adaptive_block(law);
  }

  json j;
  j["kind"] = a.kind;
  if (a.spectral) {
    if (a.pair) {
      require(a.kind == "adaptive", ErrKind::Validation,
              "chain: --pair applies to the adaptive chain only");
      const ChainMatrix cm = adaptive_pair_matrix(m, law);
      j["states"] = cm.nstates;
      j["spectrum"] = poincare_json(poincare_constant(cm));
    } else {
      const ChainMatrix cm = transition_matrix(m, spec);
      j["states"] = cm.nstates;
      j["spectrum"] = poincare_json(poincare_constant(cm));
    }
  }
  if (!a.target.empty()) {
    require(a.steps >= 1, ErrKind::Validation, "chain: --steps must be >= 1 for hitting runs");
    require(a.target == "enter-plus" || a.target == "leave-plus", ErrKind::Validation,
            "chain: --target must be enter-plus or leave-plus");
    const std::uint32_t cmask = m.clique_mask();
    const bool enter = a.target == "enter-plus";
    const auto hit = [&](SpinConfig x) { return enter == in_mode(cmask, +1, x); };
    const SpinConfig start = parse_start(a.start, m.n);
    json h;
    h["target"] = a.target;
    h["steps"] = a.steps;
    h["start"] = start;
    if (a.exact) {
      const ChainMatrix cm = transition_matrix(m, spec);
      std::vector<std::uint8_t> target(cm.nstates, 0);
      for (std::size_t x = 0; x < cm.nstates; ++x)
        target[x] = hit(static_cast<SpinConfig>(x)) ? 1 : 0;
      const std::vector<double> u = hitting_probability_exact(cm, target, a.steps);
      h["hit_probability_from_start"] = u[start];
      h["hit_probability_worst_start"] = *std::min_element(u.begin(), u.end());
    }
    if (a.trials > 0) {
      const HittingTrials ht =
          run_hitting_trials(m, spec, start, hit, a.steps, a.trials, RngStream(seed));
      h["trials"] = ht.trials;
      h["hits"] = ht.hits;
      h["hit_fraction"] = static_cast<double>(ht.hits) / static_cast<double>(ht.trials);
    }
    j["hitting"] = h;
  }
  emit(j, a.out_path, out);
  return 0;
}

// ---- figure ---------------------------------------------------------------------

struct FigureArgs {
  std::string name;
  std::string out_dir;
  int trials = 0;  // 0 keeps each figure's default
  int steps = 0;
};

IsingModel default_flat_model() {
  IsingModel m;
  m.n = 4;
  m.h.assign(4, 0.0);
  return m;
}

IsingModel default_peaky_model() {
  IsingModel m;
  m.n = 4;
  m.h = {0.3, -0.2, 0.25, -0.15};
  m.edges = {{0, 1, 0.5}, {0, 2, -0.35}, {0, 3, 0.3}, {1, 2, -0.4}, {1, 3, 0.45}, {2, 3, -0.3}};
  return m;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int cmd_figure(const FigureArgs& a, std::uint64_t seed, int jobs, std::ostream& out) {
  require(!a.out_dir.empty(), ErrKind::Validation, "figure: --out-dir is required");
  std::filesystem::create_directories(a.out_dir);
  const auto wrote = [&](const std::string& path) { out << "wrote " << path << "\n"; };

  if (a.name == "recovery") {
    json summary;
    for (const auto& [tag, model] :
         {std::pair<std::string, IsingModel>{"flat", default_flat_model()},
          std::pair<std::string, IsingModel>{"peaky", default_peaky_model()}}) {
      RecoveryConfig cfg;
      cfg.model = model;
      cfg.ks = {1, 2, 3, 4};
      cfg.sample_sizes = {100, 316, 1000, 3162, 10000};
      cfg.trials = a.trials > 0 ? a.trials : 10;
      cfg.seed = seed;
      const RecoveryResult r = run_recovery(cfg, jobs);
      const std::string path = join_path(a.out_dir, "recovery_" + tag + ".csv");
      write_file(path, recovery_csv(cfg, r));
      wrote(path);
      json rows = json::array();
      for (int k : cfg.ks)
        for (int size : cfg.sample_sizes)
          rows.push_back({{"k", k},
                          {"sample_size", size},
                          {"mean_scaled_sq_err", recovery_mean_scaled_sq(r, k, size)}});
      summary[tag] = rows;
    }
    const std::string path = join_path(a.out_dir, "recovery_summary.json");
    write_file(path, summary.dump(2) + "\n");
    wrote(path);
    return 0;
  }
  if (a.name == "normality") {
    NormalityConfig cfg;
    cfg.model = default_peaky_model();
    cfg.k = 2;
    cfg.replicas = a.trials > 0 ? a.trials : 200;
    cfg.sample_size = 20000;
    cfg.seed = seed;
    const NormalityResult r = run_normality(cfg, jobs);
    const json j = {{"empirical_trace", r.empirical_trace},
                    {"gamma_trace", r.gamma_trace},
                    {"ratio", r.ratio},
                    {"converged_replicas", r.converged_replicas},
                    {"replicas", cfg.replicas},
                    {"sample_size", cfg.sample_size},
                    {"k", cfg.k}};
    const std::string path = join_path(a.out_dir, "normality.json");
    write_file(path, j.dump(2) + "\n");
    wrote(path);
    return 0;
  }
  if (a.name == "mode-escape") {
    ModeEscapeConfig cfg;
    cfg.params.n = 16;
    cfg.params.clique.resize(16);
    std::iota(cfg.params.clique.begin(), cfg.params.clique.end(), 0);
    cfg.params.coupling = 10.0;
    cfg.params.fields.assign(16, 0.01);
    cfg.delta = 0.5;
    cfg.trials = a.trials > 0 ? a.trials : 200;
    cfg.steps = a.steps;
    cfg.seed = seed;
    const ModeEscapeResult r = run_mode_escape(cfg, jobs);
    const json j = {{"constants", slow_json(r.constants)},
                    {"steps", r.steps},
                    {"trials", r.trials},
                    {"escapes", r.escapes},
                    {"escape_fraction", r.escape_fraction}};
    const std::string path = join_path(a.out_dir, "mode_escape.json");
    write_file(path, j.dump(2) + "\n");
    wrote(path);
    return 0;
  }
  if (a.name == "separation") {
    SeparationConfig cfg;
    cfg.seed = seed;
    if (a.trials > 0) cfg.trials = a.trials;
    if (a.steps > 0) cfg.slow_steps = a.steps;
    const SeparationResult r = run_separation(cfg, jobs);
    const json j = {{"n", r.n},
                    {"clique_size", r.clique_size},
                    {"k", r.k},
                    {"h_g", r.h_g},
                    {"j0", r.j0},
                    {"coupling", r.coupling},
                    {"c_fast", r.c_fast},
                    {"slow", slow_json(r.slow)},
                    {"premises", report_json(r.premises)},
                    {"block_size", report_json(r.block_size)},
                    {"trials", r.trials},
                    {"fast_steps", cfg.fast_steps},
                    {"slow_steps", cfg.slow_steps},
                    {"fast_hits", r.fast_hits},
                    {"slow_escapes", r.slow_escapes},
                    {"fast_bound", r.fast_bound},
                    {"slow_bound", r.slow_bound}};
    const std::string path = join_path(a.out_dir, "separation.json");
    write_file(path, j.dump(2) + "\n");
    wrote(path);
    return 0;
  }
  if (a.name == "sampling") {
    SamplingFigureConfig cfg;
    cfg.seed = seed;
    if (a.trials > 0) cfg.trials = a.trials;
    if (a.steps > 0) cfg.budget = a.steps;
    const SamplingFigureResult r = run_sampling_figure(cfg, jobs);
    const std::string path = join_path(a.out_dir, "sampling.csv");
    write_file(path, sampling_csv(cfg, r));
    wrote(path);
    json agg = json::array();
    for (const SamplingAggregate& g : sampling_aggregate(cfg, r))
      agg.push_back({{"coupling", g.coupling},
                     {"chain", g.chain},
                     {"hits", g.hits},
                     {"trials", g.trials},
                     {"median_hit_step",
                      std::isinf(g.median_hit_step) ? json() : json(g.median_hit_step)}});
    const std::string spath = join_path(a.out_dir, "sampling_summary.json");
    write_file(spath, agg.dump(2) + "\n");
    wrote(spath);
    return 0;
  }
  fail_validation("figure: unknown name " + a.name);
}

// ---- verify ---------------------------------------------------------------------

struct VerifyArgs {
  std::vector<std::string> suites;
  int count = 5;
  std::string out_path;
};

int cmd_verify(const VerifyArgs& a, std::uint64_t seed, std::ostream& out) {
  VerifyOptions vo;
  vo.count = a.count;
  vo.seed = seed;
  const std::vector<SuiteResult> results = run_suites(a.suites, vo);
  bool all_ok = true;
  int checks = 0;
  json jr = json::array();
  for (const SuiteResult& s : results) {
    out << "[" << s.suite << "]\n";
    json jc = json::array();
    for (const CheckOutcome& c : s.checks) {
      out << "  " << (c.ok ? "ok  " : "FAIL") << "  " << c.name << "  (" << c.detail << ")\n";
      jc.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
      ++checks;
      all_ok = all_ok && c.ok;
    }
    jr.push_back({{"suite", s.suite}, {"all_ok", s.all_ok}, {"checks", jc}});
  }
  out << (all_ok ? "verification passed" : "verification FAILED") << ": " << results.size()
      << " suites, " << checks << " checks\n";
  if (!a.out_path.empty()) write_file(a.out_path, jr.dump(2) + "\n");
  return all_ok ? 0 : 1;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"masked learning and block sampling on small pairwise spin models"};
  app.name("gmlm-lab");
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  int jobs = 0;
  app.add_option("--seed", seed, "root seed for every randomized command")
      ->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads (0 picks automatically)")
      ->capture_default_str();

  ModelArgs margs;
  CLI::App* model_cmd = app.add_subcommand(
      "model", "build a planted-clique model, write it as JSON, optionally check its premises");
  model_cmd->fallthrough();
  model_cmd->add_option("--n", margs.n, "total sites");
  model_cmd->add_option("--clique", margs.clique, "clique member sites");
  model_cmd->add_option("--coupling", margs.coupling, "pair coupling inside the clique");
  model_cmd->add_option("--clique-field", margs.clique_field, "field on clique members");
  model_cmd->add_option("--outside-field", margs.outside_field, "field on the remaining sites");
  model_cmd->add_option("--from", margs.from, "load an existing model JSON instead of building");
  model_cmd->add_option("--out", margs.out_path, "write the model JSON here");
  model_cmd->add_flag("--check", margs.check, "report premise and mode-structure checks");
  model_cmd->add_option("--k", margs.k, "block size for the block-size premise check");
  model_cmd->add_option("--big-m", margs.big_m, "escape budget M for the premise check")
      ->capture_default_str();
  model_cmd->add_option("--delta", margs.delta, "failure probability for the premise check")
      ->capture_default_str();

  EstimateArgs eargs;
  CLI::App* est_cmd =
      app.add_subcommand("estimate", "fit parameters by the masked conditional objective");
  est_cmd->fallthrough();
  est_cmd->add_option("--model", eargs.model_path, "model JSON (data generator and truth)")
      ->required();
  CLI::Option* data_opt = est_cmd->add_option("--data", eargs.data_path, "masked dataset CSV");
  est_cmd->add_option("--synthesize", eargs.synthesize,
                      "draw this many configurations from the model instead of reading data")
      ->excludes(data_opt);
  est_cmd->add_option("--k", eargs.k, "uniform mask size");
  est_cmd->add_option("--law", eargs.law_path, "mask law JSON");
  est_cmd->add_option("--masks-per-sequence", eargs.masks_per_sequence,
                      "masks recorded per drawn configuration")
      ->capture_default_str();
  est_cmd->add_flag("--population", eargs.population,
                    "average over every size-k mask instead of recorded masks");
  est_cmd->add_option("--out", eargs.out_path, "write the fit report JSON here");
  est_cmd->add_option("--save-data", eargs.save_data, "also write the dataset CSV here");
  est_cmd->add_option("--step", eargs.fit.step, "initial gradient step")->capture_default_str();
  est_cmd->add_option("--max-iters", eargs.fit.max_iters, "iteration cap")->capture_default_str();
  est_cmd->add_option("--tol", eargs.fit.grad_tol, "gradient norm stopping tolerance")
      ->capture_default_str();

  AsymArgs aargs;
  CLI::App* asym_cmd = app.add_subcommand(
      "asymptotics", "population curvature, information equality, and covariance comparisons");
  asym_cmd->fallthrough();
  asym_cmd->add_option("--model", aargs.model_path, "model JSON")->required();
  asym_cmd->add_option("--k", aargs.k, "uniform mask size");
  asym_cmd->add_option("--law", aargs.law_path, "mask law JSON");
  asym_cmd->add_option("--monotone", aargs.monotone,
                       "compare asymptotic covariances across these mask sizes");
  asym_cmd->add_flag("--variance-bound", aargs.variance_bound,
                     "check the spectral-constant bound against the inverse Fisher information");
  asym_cmd->add_option("--out", aargs.out_path, "write the report JSON here");

  ChainArgs cargs;
  CLI::App* chain_cmd =
      app.add_subcommand("chain", "spectra and hitting behaviour of the samplers");
  chain_cmd->fallthrough();
  chain_cmd->add_option("--model", cargs.model_path, "model JSON")->required();
  chain_cmd->add_option("--chain", cargs.kind, "kgibbs, independent, weighted, or adaptive")
      ->check(CLI::IsMember({"kgibbs", "independent", "weighted", "adaptive"}))
      ->capture_default_str();
  chain_cmd->add_option("--k", cargs.k, "block size for kgibbs")->capture_default_str();
  chain_cmd->add_option("--law", cargs.law_path, "mask law JSON for weighted/adaptive");
  chain_cmd->add_flag("--spectral", cargs.spectral,
                      "exact spectral constant of the transition matrix");
  chain_cmd->add_flag("--pair", cargs.pair,
                      "spectrum of the fixed-block pair chain instead of the collapsed one");
  chain_cmd->add_option("--target", cargs.target, "hitting target: enter-plus or leave-plus");
  chain_cmd->add_option("--steps", cargs.steps, "step budget for hitting runs");
  chain_cmd->add_option("--trials", cargs.trials, "simulated hitting trials");
  chain_cmd->add_flag("--exact", cargs.exact, "exact hitting probabilities via the matrix");
  chain_cmd->add_option("--start", cargs.start, "all-minus, all-plus, zero, or a config integer")
      ->capture_default_str();
  chain_cmd->add_option("--out", cargs.out_path, "write the report JSON here");

  FigureArgs fargs;
  CLI::App* fig_cmd = app.add_subcommand("figure", "run a packaged experiment and write its files");
  fig_cmd->fallthrough();
  fig_cmd->add_option("--name", fargs.name, "recovery, normality, mode-escape, separation, or sampling")
      ->check(CLI::IsMember({"recovery", "normality", "mode-escape", "separation", "sampling"}))
      ->required();
  fig_cmd->add_option("--out-dir", fargs.out_dir, "directory for the emitted files")->required();
  fig_cmd->add_option("--trials", fargs.trials, "override the figure's trial/replica count");
  fig_cmd->add_option("--steps", fargs.steps, "override the figure's step budget");

  VerifyArgs vargs;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the self-check suites on random instances");
  verify_cmd->fallthrough();
  std::vector<std::string> suite_choices = suite_names();
  suite_choices.push_back("all");
  verify_cmd->add_option("--suite", vargs.suites, "suites to run (default: all)")
      ->check(CLI::IsMember(suite_choices));
  verify_cmd->add_option("--count", vargs.count, "random instances per suite")
      ->capture_default_str();
  verify_cmd->add_option("--out", vargs.out_path, "write the outcome JSON here");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    jobs = resolve_jobs(jobs);
    if (model_cmd->parsed()) return cmd_model(margs, out);
    if (est_cmd->parsed()) return cmd_estimate(eargs, seed, out);
    if (asym_cmd->parsed()) return cmd_asymptotics(aargs, out);
    if (chain_cmd->parsed()) return cmd_chain(cargs, seed, out);
    if (fig_cmd->parsed()) return cmd_figure(fargs, seed, jobs, out);
    if (verify_cmd->parsed()) return cmd_verify(vargs, seed, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrKind::Validation:
        return 2;
      case ErrKind::Capacity:
        return 3;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gmlm
