#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "gmlm/errors.hpp"
#include "gmlm/numerics.hpp"
#include "gmlm/rng.hpp"

using gmlm::FiniteDistribution;
using gmlm::SymMatrix;

namespace {

SymMatrix random_symmetric(gmlm::RngStream& rng, int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) m.set_sym(i, j, 2.0 * rng.uniform01() - 1.0);
  return m;
}

SymMatrix random_spd(gmlm::RngStream& rng, int dim) {
  // B^T B + I is safely positive definite.
  const SymMatrix b = random_symmetric(rng, dim);
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      double v = (i == j) ? 1.0 : 0.0;
      for (int l = 0; l < dim; ++l) v += b.at(l, i) * b.at(l, j);
      m.set_sym(i, j, v);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("jacobi solves a 2x2 with known spectrum") {
  SymMatrix m(2);
  m.set_sym(0, 0, 2.0);
  m.set_sym(1, 1, 2.0);
  m.set_sym(0, 1, 1.0);
  const auto eig = gmlm::jacobi_eigen(m);
  REQUIRE(eig.values.size() == 2);
  CHECK(eig.values[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-14));
  // Leading eigenvector is (1,1)/sqrt(2) up to sign.
  const double align = eig.vectors[0 * 2 + 0] + eig.vectors[1 * 2 + 0];
  CHECK(std::abs(align) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("jacobi reconstructs and stays orthogonal") {
  gmlm::RngStream rng(21);
  const int dim = 7;
  const SymMatrix m = random_symmetric(rng, dim);
  const auto eig = gmlm::jacobi_eigen(m);

  for (int j = 0; j + 1 < dim; ++j) CHECK(eig.values[j] >= eig.values[j + 1]);

  // V^T V = I.
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      double v = 0.0;
      for (int l = 0; l < dim; ++l) v += eig.vectors[l * dim + i] * eig.vectors[l * dim + j];
      CHECK(v == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    }
  }

  // V diag(values) V^T = m.
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      double v = 0.0;
      for (int l = 0; l < dim; ++l)
        v += eig.vectors[i * dim + l] * eig.values[l] * eig.vectors[j * dim + l];
      CHECK(v == doctest::Approx(m.at(i, j)).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("invert_spd produces a true inverse and rejects indefinite input") {
  gmlm::RngStream rng(22);
  const int dim = 6;
  const SymMatrix m = random_spd(rng, dim);
  const SymMatrix inv = gmlm::invert_spd(m);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      double v = 0.0;
      for (int l = 0; l < dim; ++l) v += m.at(i, l) * inv.at(l, j);
      CHECK(v == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
    }
  }

  SymMatrix bad(2);
  bad.set_sym(0, 0, 1.0);
  bad.set_sym(1, 1, 1.0);
  bad.set_sym(0, 1, 2.0);  // eigenvalues 3 and -1
  CHECK_THROWS_AS(gmlm::invert_spd(bad), gmlm::Error);
}

TEST_CASE("psd_gap is the smallest eigenvalue") {
  CHECK(gmlm::psd_gap(SymMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-14));
  SymMatrix m(2);
  m.set_sym(0, 0, 1.0);
  m.set_sym(1, 1, 1.0);
  m.set_sym(0, 1, 2.0);
  CHECK(gmlm::psd_gap(m) == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("SymMatrix helpers keep both triangles in step") {
  SymMatrix m(3);
  m.set_sym(0, 2, 5.0);
  m.add_sym(0, 2, 1.0);
  CHECK(m.at(0, 2) == 6.0);
  CHECK(m.at(2, 0) == 6.0);
  m.set_sym(1, 1, 4.0);
  CHECK(m.trace() == 4.0);
  const SymMatrix d = m.minus(m.scaled(0.5));
  CHECK(d.at(0, 2) == 3.0);
  CHECK(d.frobenius() == doctest::Approx(m.frobenius() * 0.5).epsilon(1e-14));
}

TEST_CASE("central differences recover a polynomial gradient") {
  const auto f = [](const std::vector<double>& x) {
    return x[0] * x[0] + 3.0 * x[0] * x[1] - 2.0 * x[1];
  };
  const std::vector<double> x = {1.0, 2.0};
  const auto g = gmlm::finite_diff_gradient(f, x, 1e-5);
  REQUIRE(g.size() == 2);
  CHECK(g[0] == doctest::Approx(2.0 * x[0] + 3.0 * x[1]).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(3.0 * x[0] - 2.0).epsilon(1e-8));
}

TEST_CASE("FiniteDistribution validates and samples with the right frequencies") {
  FiniteDistribution d;
  d.p = {0.25, 0.75};
  d.validate();

  FiniteDistribution bad;
  bad.p = {0.5, 0.6};
  CHECK_THROWS_AS(bad.validate(), gmlm::Error);
  bad.p = {-0.1, 1.1};
  CHECK_THROWS_AS(bad.validate(), gmlm::Error);

  gmlm::RngStream rng(23);
  const int draws = 40000;
  int ones = 0;
  for (int i = 0; i < draws; ++i) ones += d.sample(rng) == 1 ? 1 : 0;
  CHECK(std::abs(static_cast<double>(ones) / draws - 0.75) < 0.015);

  // Same seed, same draws.
  gmlm::RngStream r1(99), r2(99);
  for (int i = 0; i < 50; ++i) CHECK(d.sample(r1) == d.sample(r2));
}

TEST_CASE("tv and kl behave on known pairs") {
  FiniteDistribution a, b;
  a.p = {1.0, 0.0};
  b.p = {0.0, 1.0};
  CHECK(gmlm::tv_distance(a, b) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gmlm::kl_divergence(a, a) == 0.0);
  CHECK(std::isinf(gmlm::kl_divergence(a, b)));

  FiniteDistribution q;
  q.p = {0.5, 0.5};
  CHECK(gmlm::kl_divergence(a, q) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("log-sum-exp stays stable far from zero") {
  gmlm::LogSumExp acc;
  acc.add(std::log(1.0));
  acc.add(std::log(2.0));
  acc.add(std::log(3.0));
  CHECK(acc.value() == doctest::Approx(std::log(6.0)).epsilon(1e-14));

  gmlm::LogSumExp far;
  far.add(-1000.0);
  far.add(-1001.0);
  CHECK(far.value() == doctest::Approx(-1000.0 + std::log1p(std::exp(-1.0))).epsilon(1e-14));

  gmlm::LogSumExp empty;
  CHECK(std::isinf(empty.value()));
  CHECK(empty.value() < 0.0);
}
