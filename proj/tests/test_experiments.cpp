#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmlm/bits.hpp"
#include "gmlm/chains.hpp"
#include "gmlm/clique_system.hpp"
#include "gmlm/experiments.hpp"
#include "gmlm/ising.hpp"
#include "gmlm/numerics.hpp"
#include "gmlm/rng.hpp"

using gmlm::CliqueParams;
using gmlm::CliqueSystem;
using gmlm::IsingModel;
using gmlm::SpinConfig;
using gmlm::WideConfig;

namespace {

CliqueParams small_params() {
  CliqueParams p;
  p.n = 12;
  p.clique = {0, 1, 2, 3, 4};
  p.coupling = 1.3;
  p.fields.assign(12, 0.0);
  for (int i = 0; i < 5; ++i) p.fields[static_cast<std::size_t>(i)] = 0.25;
  p.fields[7] = -0.1;
  p.fields[10] = 0.05;
  return p;
}

}  // namespace

TEST_CASE("the wide representation reproduces the generic log weight") {
  const CliqueParams p = small_params();
  const IsingModel m = gmlm::build_clique_ising(p);
  const CliqueSystem sys = gmlm::make_clique_system(p.n, p.clique, p.coupling, p.fields);

  gmlm::RngStream rng(71);
  for (int rep = 0; rep < 200; ++rep) {
    const SpinConfig x = static_cast<SpinConfig>(rng.below(1u << p.n));
    CHECK(gmlm::wide_log_weight(sys, x) ==
          doctest::Approx(gmlm::log_weight(m, x)).epsilon(1e-12).scale(1.0));
  }

  const auto vs = sys.scales();
  const auto vm = gmlm::clique_scales(m);
  CHECK(vs.c == vm.c);
  CHECK(vs.h_g == doctest::Approx(vm.h_g).epsilon(1e-14));
  CHECK(vs.j0 == doctest::Approx(vm.j0).epsilon(1e-14));
}

TEST_CASE("the factored block conditional matches the enumeration path") {
  const CliqueParams p = small_params();
  const IsingModel m = gmlm::build_clique_ising(p);
  const CliqueSystem sys = gmlm::make_clique_system(p.n, p.clique, p.coupling, p.fields);

  gmlm::RngStream rng(72);
  for (int rep = 0; rep < 30; ++rep) {
    const SpinConfig x = static_cast<SpinConfig>(rng.below(1u << p.n));
    std::uint32_t block = 0;
    while (std::popcount(block) == 0 || std::popcount(block) > 6)
      block = static_cast<std::uint32_t>(1 + rng.below((1u << p.n) - 1));
    const auto wide = gmlm::clique_block_conditional(sys, x, block);
    const auto generic = gmlm::block_conditional(m, x, block);
    REQUIRE(wide.size() == generic.size());
    for (std::size_t a = 0; a < wide.size(); ++a)
      CHECK(wide.p[a] == doctest::Approx(generic.p[a]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("wide site-parallel steps follow the single-site conditionals") {
  const CliqueParams p = small_params();
  const IsingModel m = gmlm::build_clique_ising(p);
  const CliqueSystem sys = gmlm::make_clique_system(p.n, p.clique, p.coupling, p.fields);

  const WideConfig x = 0b001010110101u;
  gmlm::RngStream rng(73);
  const int draws = 20000;
  std::vector<int> plus(static_cast<std::size_t>(p.n), 0);
  for (int t = 0; t < draws; ++t) {
    const WideConfig y = gmlm::clique_independent_parallel_step(sys, x, rng);
    for (int i = 0; i < p.n; ++i)
      plus[static_cast<std::size_t>(i)] += (y >> i) & 1u ? 1 : 0;
  }
  for (int i = 0; i < p.n; ++i) {
    const double want = gmlm::single_site_conditional(m, static_cast<SpinConfig>(x), i);
    const double got = static_cast<double>(plus[static_cast<std::size_t>(i)]) / draws;
    CHECK(std::abs(got - want) <= 4.0 * std::sqrt(want * (1.0 - want) / draws) + 1e-4);
  }
}

TEST_CASE("wide k-Gibbs sampling visits states with joint frequencies") {
  CliqueParams p;
  p.n = 10;
  p.clique = {0, 1, 2};
  p.coupling = 0.8;
  p.fields.assign(10, 0.0);
  for (int i = 0; i < 3; ++i) p.fields[static_cast<std::size_t>(i)] = 0.3;
  const IsingModel m = gmlm::build_clique_ising(p);
  const CliqueSystem sys = gmlm::make_clique_system(p.n, p.clique, p.coupling, p.fields);

  const auto joint = gmlm::joint_table(m);
  gmlm::FiniteDistribution emp;
  emp.p.assign(joint.size(), 0.0);
  gmlm::RngStream rng(74);
  WideConfig x = 0;
  const int burn = 300, draws = 60000;
  for (int t = 0; t < burn; ++t) x = gmlm::clique_kgibbs_step(sys, x, 4, rng);
  for (int t = 0; t < draws; ++t) {
    x = gmlm::clique_kgibbs_step(sys, x, 4, rng);
    emp.p[static_cast<std::size_t>(x)] += 1.0 / draws;
  }
  CHECK(gmlm::tv_distance(emp, joint) < 0.05);
}

TEST_CASE("parallel_for fills disjoint slots identically for any thread count") {
  const std::size_t count = 61;
  auto run = [&](int jobs) {
    std::vector<double> slots(count, 0.0);
    gmlm::parallel_for(jobs, count, [&](std::size_t i) {
      gmlm::RngStream s = gmlm::RngStream(5).derive(i);
      slots[i] = s.uniform01();
    });
    return slots;
  };
  const auto one = run(1);
  CHECK(run(4) == one);
  CHECK(run(16) == one);

  std::atomic<int> done{0};
  CHECK_THROWS_AS(gmlm::parallel_for(4, 10,
                                     [&](std::size_t i) {
                                       if (i == 3) throw std::runtime_error("boom");
                                       done.fetch_add(1);
                                     }),
                  std::runtime_error);
}

TEST_CASE("job resolution prefers the request, then the environment") {
  CHECK(gmlm::resolve_jobs(3) == 3);
  setenv("GMLM_LAB_JOBS", "2", 1);
  CHECK(gmlm::resolve_jobs(0) == 2);
  unsetenv("GMLM_LAB_JOBS");
  const int j = gmlm::resolve_jobs(0);
  CHECK(j >= 1);
  CHECK(j <= 16);
}

TEST_CASE("estimation error cells are ordered, converged and thread-count independent") {
  gmlm::RecoveryConfig cfg;
  cfg.model.n = 3;
  cfg.model.h = {0.3, -0.2, 0.1};
  cfg.model.edges.push_back({0, 1, 0.5});
  cfg.model.edges.push_back({1, 2, -0.4});
  cfg.ks = {1, 3};
  cfg.sample_sizes = {40, 80};
  cfg.trials = 2;
  cfg.seed = 5;

  const auto r = gmlm::run_recovery(cfg, 1);
  REQUIRE(r.cells.size() == 8);
  std::size_t idx = 0;
  for (int trial = 0; trial < 2; ++trial) {
    for (int size : cfg.sample_sizes) {
      for (int k : cfg.ks) {
        const auto& cell = r.cells[idx++];
        CHECK(cell.trial == trial);
        CHECK(cell.sample_size == size);
        CHECK(cell.k == k);
        CHECK(cell.converged);
        CHECK(cell.err > 0.0);
        CHECK(cell.scaled_sq == doctest::Approx(size * cell.err * cell.err).epsilon(1e-12));
      }
    }
  }

  double manual = 0.0;
  for (const auto& cell : r.cells)
    if (cell.k == 3 && cell.sample_size == 80) manual += cell.scaled_sq / 2.0;
  CHECK(gmlm::recovery_mean_scaled_sq(r, 3, 80) == doctest::Approx(manual).epsilon(1e-12));

  const std::string csv = gmlm::recovery_csv(cfg, r);
  CHECK(csv.rfind("# recovery seed=5 config=", 0) == 0);
  const auto r4 = gmlm::run_recovery(cfg, 4);
  CHECK(gmlm::recovery_csv(cfg, r4) == csv);
}

TEST_CASE("mode escape runs stay put at strong coupling") {
  gmlm::ModeEscapeConfig cfg;
  cfg.params.n = 6;
  cfg.params.clique = {0, 1, 2, 3, 4, 5};
  cfg.params.coupling = 4.0;
  cfg.params.fields.assign(6, 0.01);
  cfg.trials = 30;
  cfg.steps = 20;
  cfg.seed = 3;
  const auto r = gmlm::run_mode_escape(cfg, 2);
  CHECK(r.trials == 30);
  CHECK(r.steps == 20);
  CHECK(r.constants.c_stuck > 0.0);
  CHECK(r.escapes == 0);
  CHECK(r.escape_fraction == 0.0);
}

TEST_CASE("sampler comparison cells are ordered and deterministic") {
  gmlm::SamplingFigureConfig cfg;
  cfg.n = 6;
  cfg.clique = {0, 1, 2};
  cfg.field = 1.0;
  cfg.couplings = {1.0, 4.0};
  cfg.ks = {3, 6};
  cfg.include_independent = true;
  cfg.budget = 200;
  cfg.trials = 3;
  cfg.seed = 11;

  const auto r = gmlm::run_sampling_figure(cfg, 1);
  REQUIRE(r.cells.size() == 2 * 3 * 3);
  std::size_t idx = 0;
  for (double coupling : cfg.couplings) {
    for (const std::string chain : {"kgibbs3", "kgibbs6", "independent"}) {
      for (int trial = 0; trial < 3; ++trial) {
        const auto& cell = r.cells[idx++];
        CHECK(cell.coupling == coupling);
        CHECK(cell.chain == chain);
        CHECK(cell.trial == trial);
        CHECK(cell.hit_step >= -1);
        CHECK(cell.hit_step <= cfg.budget);
      }
    }
  }

  const auto agg = gmlm::sampling_aggregate(cfg, r);
  REQUIRE(agg.size() == 6);
  for (const auto& a : agg) {
    CHECK(a.trials == 3);
    CHECK(a.hits >= 0);
    CHECK(a.hits <= 3);
    if (a.hits == 0) CHECK(std::isinf(a.median_hit_step));
    if (a.hits > 0) CHECK(a.median_hit_step >= 0.0);
  }

  const std::string csv = gmlm::sampling_csv(cfg, r);
  const auto r2 = gmlm::run_sampling_figure(cfg, 2);
  CHECK(gmlm::sampling_csv(cfg, r2) == csv);
}

TEST_CASE("the built separation instance satisfies its premises and separates") {
  gmlm::SeparationConfig cfg;  // defaults: delta 0.25, M 5, 500 trials
  const auto r = gmlm::run_separation(cfg, 1);
  CHECK(r.n == 48);
  CHECK(r.clique_size == 44);
  CHECK(r.k == 48);
  CHECK(r.premises.holds);
  CHECK(r.block_size.holds);
  CHECK(r.c_fast == doctest::Approx(0.0625).epsilon(1e-6));
  CHECK(r.fast_bound == doctest::Approx(1.0 - std::pow(r.c_fast, cfg.fast_steps)).epsilon(1e-12));
  CHECK(r.slow_bound == 0.125);
  CHECK(r.slow.t_bound >= cfg.slow_steps);
  CHECK(r.fast_hits == cfg.trials);
  CHECK(r.slow_escapes == 0);
}

TEST_CASE("rescaled estimation errors have the predicted covariance scale") {
  gmlm::NormalityConfig cfg;
  cfg.model.n = 3;
  cfg.model.h = {0.2, -0.1, 0.15};
  cfg.model.edges.push_back({0, 1, 0.4});
  cfg.model.edges.push_back({0, 2, -0.3});
  cfg.k = 2;
  cfg.replicas = 60;
  cfg.sample_size = 2000;
  cfg.seed = 2;
  const auto r = gmlm::run_normality(cfg, 2);
  CHECK(r.converged_replicas == 60);
  CHECK(r.gamma_trace > 0.0);
  CHECK(r.ratio == doctest::Approx(r.empirical_trace / r.gamma_trace).epsilon(1e-12));
  CHECK(r.ratio > 0.5);
  CHECK(r.ratio < 1.6);
}
