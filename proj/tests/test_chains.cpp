#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "gmlm/chains.hpp"
#include "gmlm/ising.hpp"
#include "gmlm/masking.hpp"
#include "gmlm/numerics.hpp"
#include "gmlm/rng.hpp"

using gmlm::ChainMatrix;
using gmlm::ChainSpec;
using gmlm::IsingModel;
using gmlm::MaskDistribution;
using gmlm::SpinConfig;

namespace {

IsingModel flat_model(int n) {
  IsingModel m;
  m.n = n;
  m.h.assign(static_cast<std::size_t>(n), 0.0);
  return m;
}

IsingModel random_model(gmlm::RngStream& rng, int n) {
  IsingModel m;
  m.n = n;
  for (int i = 0; i < n; ++i) m.h.push_back(0.5 * (2.0 * rng.uniform01() - 1.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      m.edges.push_back({i, j, 0.4 * (2.0 * rng.uniform01() - 1.0)});
  return m;
}

MaskDistribution random_adaptive_law(gmlm::RngStream& rng, int n) {
  std::vector<std::uint32_t> blocks;
  for (std::uint32_t b = 1; b < (1u << n); ++b) blocks.push_back(b);
  std::vector<std::vector<double>> table;
  for (int s = 0; s < (1 << n); ++s) {
    std::vector<double> row;
    double total = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      row.push_back(0.1 + rng.uniform01());
      total += row.back();
    }
    for (auto& p : row) p /= total;
    table.push_back(row);
  }
  return MaskDistribution::adaptive(n, blocks, table);
}

void check_rows_and_stationarity(const ChainMatrix& cm, bool expect_stationary) {
  double worst_row = 0.0, worst_flow = 0.0;
  for (std::size_t from = 0; from < cm.nstates; ++from) {
    double row = 0.0;
    for (std::size_t to = 0; to < cm.nstates; ++to) row += cm.at(from, to);
    worst_row = std::max(worst_row, std::abs(row - 1.0));
  }
  for (std::size_t to = 0; to < cm.nstates; ++to) {
    double flow = 0.0;
    for (std::size_t from = 0; from < cm.nstates; ++from)
      flow += cm.pi[from] * cm.at(from, to);
    worst_flow = std::max(worst_flow, std::abs(flow - cm.pi[to]));
  }
  CHECK(worst_row <= 1e-12);
  if (expect_stationary) CHECK(worst_flow <= 1e-12);
}

std::vector<double> random_vector(gmlm::RngStream& rng, std::size_t n) {
  std::vector<double> f(n);
  for (auto& v : f) v = 2.0 * rng.uniform01() - 1.0;
  return f;
}

}  // namespace

TEST_CASE("field-free two-site constants are exactly 2 and 1") {
  const IsingModel m = flat_model(2);
  const auto one = gmlm::poincare_constant(gmlm::transition_matrix(m, ChainSpec::k_gibbs(1)));
  CHECK(!one.infinite);
  CHECK(one.c == doctest::Approx(2.0).epsilon(1e-9));

  const auto full = gmlm::poincare_constant(gmlm::transition_matrix(m, ChainSpec::k_gibbs(2)));
  CHECK(full.c == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("resampling the full block lands on the joint in one step") {
  gmlm::RngStream rng(61);
  const IsingModel m = random_model(rng, 3);
  const auto cm = gmlm::transition_matrix(m, ChainSpec::k_gibbs(3));
  for (std::size_t from = 0; from < cm.nstates; ++from)
    for (std::size_t to = 0; to < cm.nstates; ++to)
      CHECK(cm.at(from, to) == doctest::Approx(cm.pi[to]).epsilon(1e-12));
  const auto pc = gmlm::poincare_constant(cm);
  CHECK(pc.c == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("block-resampling chains are stationary for the joint, the site-parallel one is not") {
  gmlm::RngStream rng(62);
  const IsingModel m = random_model(rng, 3);

  check_rows_and_stationarity(gmlm::transition_matrix(m, ChainSpec::k_gibbs(2)), true);

  const auto weighted = MaskDistribution::weighted(3, {0b011u, 0b101u, 0b110u}, {0.3, 0.3, 0.4});
  check_rows_and_stationarity(gmlm::transition_matrix(m, ChainSpec::weighted_block(weighted)),
                              true);

  const auto adaptive = random_adaptive_law(rng, 3);
  check_rows_and_stationarity(gmlm::transition_matrix(m, ChainSpec::adaptive_block(adaptive)),
                              true);

  // Strong couplings: redrawing every site from the current state's
  // conditionals does not preserve the joint.
  IsingModel coupled = flat_model(2);
  coupled.edges.push_back({0, 1, 1.5});
  const auto ind = gmlm::transition_matrix(coupled, ChainSpec::independent_parallel());
  double worst_row = 0.0, worst_flow = 0.0;
  for (std::size_t from = 0; from < ind.nstates; ++from) {
    double row = 0.0;
    for (std::size_t to = 0; to < ind.nstates; ++to) row += ind.at(from, to);
    worst_row = std::max(worst_row, std::abs(row - 1.0));
  }
  for (std::size_t to = 0; to < ind.nstates; ++to) {
    double flow = 0.0;
    for (std::size_t from = 0; from < ind.nstates; ++from)
      flow += ind.pi[from] * ind.at(from, to);
    worst_flow = std::max(worst_flow, std::abs(flow - ind.pi[to]));
  }
  CHECK(worst_row <= 1e-12);
  CHECK(worst_flow > 1e-3);
}

TEST_CASE("the quadratic form identity and the variance inequality hold") {
  gmlm::RngStream rng(63);
  const IsingModel m = random_model(rng, 3);
  const std::vector<ChainSpec> specs = {
      ChainSpec::k_gibbs(1), ChainSpec::k_gibbs(2),
      ChainSpec::weighted_block(
          MaskDistribution::weighted(3, {0b001u, 0b010u, 0b100u, 0b111u}, {0.2, 0.2, 0.2, 0.4})),
      ChainSpec::adaptive_block(random_adaptive_law(rng, 3))};
  for (const auto& spec : specs) {
    const auto cm = gmlm::transition_matrix(m, spec);
    const auto pc = gmlm::poincare_constant(cm);
    REQUIRE(!pc.infinite);
    CHECK(pc.reversibility_residual <= 1e-8);
    for (int rep = 0; rep < 4; ++rep) {
      const auto f = random_vector(rng, cm.nstates);
      const auto g = random_vector(rng, cm.nstates);
      const double form = gmlm::dirichlet_form(cm, f, g);
      const double inner = gmlm::dirichlet_inner(cm, f, g);
      CHECK(form == doctest::Approx(inner).epsilon(1e-10).scale(1.0));
      CHECK(gmlm::pi_variance(cm, f) <= pc.c * gmlm::dirichlet_form(cm, f, f) + 1e-10);
    }
  }
}

TEST_CASE("holding the drawn block fixed disconnects the pair chain") {
  gmlm::RngStream rng(64);
  const IsingModel m = random_model(rng, 3);
  const auto law = random_adaptive_law(rng, 3);

  const auto pair = gmlm::adaptive_pair_matrix(m, law);
  const auto pc = gmlm::poincare_constant(pair);
  CHECK(pc.infinite);

  // On functions of the configuration alone the pair chain and the collapsed
  // chain induce the same quadratic form.
  const auto collapsed = gmlm::transition_matrix(m, ChainSpec::adaptive_block(law));
  for (int rep = 0; rep < 5; ++rep) {
    const auto f = random_vector(rng, collapsed.nstates);
    const auto g = random_vector(rng, collapsed.nstates);
    std::vector<double> f_lift(pair.nstates), g_lift(pair.nstates);
    for (std::size_t s = 0; s < pair.nstates; ++s) {
      f_lift[s] = f[pair.pair_states[s].first];
      g_lift[s] = g[pair.pair_states[s].first];
    }
    CHECK(gmlm::dirichlet_form(pair, f_lift, g_lift) ==
          doctest::Approx(gmlm::dirichlet_form(collapsed, f, g)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("one-site chains have a closed-form hitting recursion") {
  // Single site with field: each step redraws the site from the marginal, so
  // the chance of having hit the plus state after T steps is 1 - (1-p)^T.
  IsingModel m;
  m.n = 1;
  m.h = {0.4};
  const double p_plus = gmlm::joint_table(m).p[1];
  const auto cm = gmlm::transition_matrix(m, ChainSpec::k_gibbs(1));
  const std::vector<std::uint8_t> target = {0, 1};
  for (int steps : {1, 3, 10}) {
    const auto u = gmlm::hitting_probability_exact(cm, target, steps);
    CHECK(u[1] == 1.0);  // already there
    CHECK(u[0] == doctest::Approx(1.0 - std::pow(1.0 - p_plus, steps)).epsilon(1e-12));
  }
}

TEST_CASE("simulated first-entry frequencies match the exact recursion") {
  gmlm::CliqueParams p;
  p.n = 4;
  p.clique = {0, 1};
  p.coupling = 2.0;
  p.fields = {0.1, 0.1, 0.0, 0.0};
  const IsingModel m = gmlm::build_clique_ising(p);
  const std::uint32_t cmask = m.clique_mask();
  const auto spec = ChainSpec::k_gibbs(2);
  const int steps = 8;

  const auto cm = gmlm::transition_matrix(m, spec);
  std::vector<std::uint8_t> target(cm.nstates, 0);
  for (std::size_t x = 0; x < cm.nstates; ++x)
    target[x] = gmlm::in_mode(cmask, +1, static_cast<SpinConfig>(x)) ? 1 : 0;
  const double u0 = gmlm::hitting_probability_exact(cm, target, steps)[0];

  const int trials = 4000;
  const auto sim = gmlm::run_hitting_trials(
      m, spec, 0,
      [&](SpinConfig x) { return gmlm::in_mode(cmask, +1, x); }, steps, trials,
      gmlm::RngStream(7));
  CHECK(sim.trials == trials);
  const double freq = static_cast<double>(sim.hits) / trials;
  CHECK(std::abs(freq - u0) <= 4.0 * std::sqrt(u0 * (1.0 - u0) / trials) + 1e-6);
  for (int s : sim.hit_step) CHECK(s <= steps);

  // Trial streams are derived from the root, so reruns reproduce hit times.
  const auto again = gmlm::run_hitting_trials(
      m, spec, 0,
      [&](SpinConfig x) { return gmlm::in_mode(cmask, +1, x); }, steps, trials,
      gmlm::RngStream(7));
  CHECK(again.hit_step == sim.hit_step);
}

TEST_CASE("the one-step miss constant is vacuous below the clique size and shrinks with k") {
  gmlm::CliqueParams p;
  p.n = 6;
  p.clique = {0, 1, 2, 3};
  p.coupling = 6.0;
  p.fields = {0.2, 0.2, 0.2, 0.2, 0.01, 0.01};
  const IsingModel m = gmlm::build_clique_ising(p);
  CHECK(gmlm::check_strongly_ferromagnetic(m).holds);

  CHECK(gmlm::mode_fast_constant(m, 3) == 1.0);
  double prev = 1.0;
  for (int k = 4; k <= 6; ++k) {
    const double c = gmlm::mode_fast_constant(m, k);
    CHECK(c > 0.0);
    CHECK(c < 1.0);
    CHECK(c <= prev);
    prev = c;
  }
}

TEST_CASE("low-temperature escape constants match hand-checked values and clamp") {
  gmlm::CliqueParams p;
  p.n = 16;
  p.clique = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  p.coupling = 10.0;
  p.fields.assign(16, 0.01);
  const IsingModel m = gmlm::build_clique_ising(p);
  const auto sc = gmlm::mode_slow_constants(m, 0.5);
  CHECK(sc.c_stuck == doctest::Approx(6.1249999205227885).epsilon(1e-12));
  CHECK(sc.t_bound == 114);
  CHECK(sc.escape_prob_bound ==
        doctest::Approx(114.0 * std::exp(-6.1249999205227885)).epsilon(1e-9));
  CHECK(sc.escape_prob_bound <= 0.25);

  // Weak interactions: the exponent is clamped at zero and the usable
  // horizon is empty, never negative.
  gmlm::CliqueParams weak = p;
  weak.coupling = 0.2;  // margin 0.04: tanh(0.04) * 8 < 1, so the exponent clamps
  const auto wc = gmlm::mode_slow_constants(gmlm::build_clique_ising(weak), 0.5);
  CHECK(wc.c_stuck == 0.0);
  CHECK(wc.t_bound == 0);
  CHECK(wc.escape_prob_bound == 0.0);
}

TEST_CASE("chain steps are reproducible and reach the joint in the long run") {
  gmlm::RngStream rng(65);
  const IsingModel m = random_model(rng, 3);
  const auto spec = ChainSpec::k_gibbs(2);

  gmlm::RngStream s1(9), s2(9);
  SpinConfig x1 = 0, x2 = 0;
  for (int t = 0; t < 50; ++t) {
    x1 = gmlm::chain_step(m, spec, x1, s1);
    x2 = gmlm::chain_step(m, spec, x2, s2);
    CHECK(x1 == x2);
  }

  const auto joint = gmlm::joint_table(m);
  gmlm::FiniteDistribution emp;
  emp.p.assign(joint.size(), 0.0);
  gmlm::RngStream walk(10);
  SpinConfig x = 0;
  const int burn = 500, draws = 40000;
  for (int t = 0; t < burn; ++t) x = gmlm::chain_step(m, spec, x, walk);
  for (int t = 0; t < draws; ++t) {
    x = gmlm::chain_step(m, spec, x, walk);
    emp.p[x] += 1.0 / draws;
  }
  CHECK(gmlm::tv_distance(emp, joint) < 0.05);
}
