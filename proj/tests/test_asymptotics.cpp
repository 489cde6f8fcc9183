#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "gmlm/asymptotics.hpp"
#include "gmlm/chains.hpp"
#include "gmlm/ising.hpp"
#include "gmlm/masking.hpp"
#include "gmlm/numerics.hpp"
#include "gmlm/rng.hpp"

using gmlm::IsingModel;
using gmlm::MaskDistribution;
using gmlm::SymMatrix;

namespace {

IsingModel random_model(gmlm::RngStream& rng, int n) {
  IsingModel m;
  m.n = n;
  for (int i = 0; i < n; ++i) m.h.push_back(0.5 * (2.0 * rng.uniform01() - 1.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      m.edges.push_back({i, j, 0.4 * (2.0 * rng.uniform01() - 1.0)});
  return m;
}

IsingModel flat_model(int n) {
  IsingModel m;
  m.n = n;
  m.h.assign(static_cast<std::size_t>(n), 0.0);
  return m;
}

double rel_frobenius_diff(const SymMatrix& a, const SymMatrix& b) {
  return a.minus(b).frobenius() / std::max(1.0, b.frobenius());
}

}  // namespace

TEST_CASE("field-free independent spins have closed-form covariance traces") {
  // With no interactions the covariance trace depends only on (n, k); for
  // n = 4 the exact values are 28, 76/5, 34/3 and 10 as k runs 1..4.
  const IsingModel m = flat_model(4);
  const std::vector<double> expected = {28.0, 76.0 / 5.0, 34.0 / 3.0, 10.0};
  for (int k = 1; k <= 4; ++k) {
    const auto law = MaskDistribution::uniform_k(4, k);
    const double tr = gmlm::asymptotic_covariance(m, law).trace();
    CHECK(tr == doctest::Approx(expected[static_cast<std::size_t>(k - 1)]).epsilon(1e-9));
  }
}

TEST_CASE("a single coupled pair has the closed-form information matrix") {
  for (double coupling : {0.3, 0.8, 1.5}) {
    IsingModel m;
    m.n = 2;
    m.h = {0.0, 0.0};
    m.edges.push_back({0, 1, coupling});
    const SymMatrix f = gmlm::fisher_information(m);
    const double t = std::tanh(coupling);
    REQUIRE(f.dim == 3);
    CHECK(f.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.at(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.at(0, 1) == doctest::Approx(t).epsilon(1e-12));
    CHECK(f.at(0, 2) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    CHECK(f.at(1, 2) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    CHECK(f.at(2, 2) == doctest::Approx(1.0 - t * t).epsilon(1e-12));
  }
}

TEST_CASE("population curvature equals the gradient covariance at the data law") {
  gmlm::RngStream rng(51);
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(3));
    const IsingModel m = random_model(rng, n);
    const auto law = MaskDistribution::uniform_k(n, 1 + static_cast<int>(rng.below(n)));
    const auto rep_eq = gmlm::check_information_equality(m, law);
    CHECK(rep_eq.ok);
    CHECK(rep_eq.rel_gap <= 1e-10);
    CHECK(rep_eq.mean_grad_norm <= 1e-10);

    const auto theta = gmlm::theta_from_model(m);
    const SymMatrix h = gmlm::population_hessian(m, law, theta);
    const auto gc = gmlm::gradient_covariance(m, law, theta);
    CHECK(rel_frobenius_diff(h, gc.cov) <= 1e-12);
  }
}

TEST_CASE("the equality also holds for adaptive laws") {
  gmlm::RngStream rng(52);
  const int n = 3;
  const IsingModel m = random_model(rng, n);
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
  const auto law = MaskDistribution::adaptive(n, blocks, table);
  const auto rep = gmlm::check_information_equality(m, law);
  CHECK(rep.ok);
  CHECK(rep.rel_gap <= 1e-10);
}

TEST_CASE("resampling more coordinates shrinks the covariance down to the full-information limit") {
  gmlm::RngStream rng(53);
  for (int rep = 0; rep < 3; ++rep) {
    const int n = 3 + static_cast<int>(rng.below(2));
    const IsingModel m = random_model(rng, n);
    std::vector<int> ks;
    for (int k = 1; k <= n; ++k) ks.push_back(k);
    const auto mono = gmlm::check_gamma_monotone(m, ks);
    CHECK(mono.ok);
    CHECK(mono.traces_decreasing);
    for (double gap : mono.psd_gaps) CHECK(gap >= -1e-8);
    for (std::size_t i = 0; i + 1 < mono.traces.size(); ++i)
      CHECK(mono.traces[i] >= mono.traces[i + 1] - 1e-10);

    // At k = n the covariance is exactly the inverse information matrix.
    const auto full = gmlm::asymptotic_covariance(m, MaskDistribution::uniform_k(n, n));
    const auto finv = gmlm::invert_spd(gmlm::fisher_information(m));
    CHECK(rel_frobenius_diff(full, finv) <= 1e-9);
  }
}

TEST_CASE("variance bound reports tightness at the full block and flags a closed gap") {
  gmlm::RngStream rng(54);
  const IsingModel m = random_model(rng, 3);
  const auto law = MaskDistribution::uniform_k(3, 3);
  const auto gamma = gmlm::asymptotic_covariance(m, law);
  const auto fisher = gmlm::fisher_information(m);

  // The full-block chain resamples everything each step: its constant is 1
  // and the bound holds with equality.
  const auto chain = gmlm::transition_matrix(m, gmlm::ChainSpec::k_gibbs(3));
  const auto pc = gmlm::poincare_constant(chain);
  CHECK(!pc.infinite);
  CHECK(pc.c == doctest::Approx(1.0).epsilon(1e-8));
  const auto bound = gmlm::check_variance_bound(gamma, fisher, pc.c);
  CHECK(bound.ok);
  CHECK(bound.psd_gap >= -1e-8);
  CHECK(bound.psd_gap <= 1e-6);

  // An infinite constant is reported as vacuous, not as a violation.
  const auto vacuous =
      gmlm::check_variance_bound(gamma, fisher, std::numeric_limits<double>::infinity());
  CHECK(vacuous.infinite_c);
  CHECK(vacuous.ok);

  CHECK_THROWS_AS(gmlm::check_variance_bound(gamma, fisher, -2.0), gmlm::Error);
}

TEST_CASE("single-site resampling obeys the variance bound strictly") {
  gmlm::RngStream rng(55);
  const IsingModel m = random_model(rng, 3);
  const auto law = MaskDistribution::uniform_k(3, 1);
  const auto gamma = gmlm::asymptotic_covariance(m, law);
  const auto fisher = gmlm::fisher_information(m);
  const auto chain = gmlm::transition_matrix(m, gmlm::ChainSpec::k_gibbs(1));
  const auto pc = gmlm::poincare_constant(chain);
  REQUIRE(!pc.infinite);
  const auto bound = gmlm::check_variance_bound(gamma, fisher, pc.c);
  CHECK(bound.ok);
}
