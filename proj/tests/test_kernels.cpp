#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "gmlm/kernels.hpp"
#include "gmlm/rng.hpp"

namespace kern = gmlm::kern;

namespace {

std::vector<double> random_vec(gmlm::RngStream& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = 2.0 * rng.uniform01() - 1.0;
  return v;
}

// Backend selection is process-global state; every case restores Auto.
struct BackendGuard {
  ~BackendGuard() { kern::set_backend(kern::Backend::Auto); }
};

}  // namespace

TEST_CASE("dot and sum match a sequential loop") {
  gmlm::RngStream rng(11);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 33u, 100u}) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);
    long double d = 0.0L, s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      d += static_cast<long double>(x[i]) * y[i];
      s += x[i];
    }
    CHECK(kern::dot(x.data(), y.data(), n) ==
          doctest::Approx(static_cast<double>(d)).epsilon(1e-13));
    CHECK(kern::sum(x.data(), n) == doctest::Approx(static_cast<double>(s)).epsilon(1e-13));
  }
}

TEST_CASE("dot3 is the triple product reduction") {
  gmlm::RngStream rng(12);
  const std::size_t n = 37;
  const auto w = random_vec(rng, n);
  const auto x = random_vec(rng, n);
  const auto y = random_vec(rng, n);
  long double d = 0.0L;
  for (std::size_t i = 0; i < n; ++i)
    d += static_cast<long double>(w[i]) * x[i] * y[i];
  CHECK(kern::dot3(w.data(), x.data(), y.data(), n) ==
        doctest::Approx(static_cast<double>(d)).epsilon(1e-13));
}

TEST_CASE("axpy, scal and rotate_pair are exact elementwise updates") {
  std::vector<double> x = {1.0, -2.0, 3.0, 0.5, -0.25};
  std::vector<double> y = {0.0, 1.0, -1.0, 2.0, 4.0};
  auto y2 = y;
  kern::axpy(0.5, x.data(), y2.data(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y2[i] == y[i] + 0.5 * x[i]);

  auto x2 = x;
  kern::scal(-2.0, x2.data(), x2.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x2[i] == -2.0 * x[i]);

  auto a = x, b = y;
  const double c = 0.6, s = 0.8;
  kern::rotate_pair(a.data(), b.data(), a.size(), c, s);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(a[i] == c * x[i] - s * y[i]);
    CHECK(b[i] == s * x[i] + c * y[i]);
  }
}

TEST_CASE("matvec multiplies a row-major matrix") {
  // 2x3 matrix [[1,2,3],[4,5,6]] times (1,1,2).
  const std::vector<double> a = {1, 2, 3, 4, 5, 6};
  const std::vector<double> x = {1, 1, 2};
  std::vector<double> y(2, 0.0);
  kern::matvec(a.data(), x.data(), y.data(), 2, 3);
  CHECK(y[0] == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(21.0).epsilon(1e-15));
}

TEST_CASE("set_backend switches the reported backend") {
  BackendGuard guard;
  kern::set_backend(kern::Backend::Scalar);
  CHECK(std::string(kern::backend_name()) == "scalar");
  if (kern::avx2_available()) {
    kern::set_backend(kern::Backend::Avx2);
    CHECK(std::string(kern::backend_name()) == "avx2");
  }
}

TEST_CASE("scalar and avx2 backends produce bit-identical results") {
  if (!kern::avx2_available()) {
    MESSAGE("avx2 not available on this machine; nothing to compare");
    return;
  }
  BackendGuard guard;
  gmlm::RngStream rng(13);
  // Sizes straddle the vector width and the blocked-accumulator boundaries.
  for (std::size_t n = 0; n <= 67; ++n) {
    const auto w = random_vec(rng, n);
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);

    kern::set_backend(kern::Backend::Scalar);
    const double dot_s = kern::dot(x.data(), y.data(), n);
    const double dot3_s = kern::dot3(w.data(), x.data(), y.data(), n);
    const double sum_s = kern::sum(x.data(), n);
    auto axpy_s = y;
    kern::axpy(0.7, x.data(), axpy_s.data(), n);
    auto rot_a_s = x, rot_b_s = y;
    kern::rotate_pair(rot_a_s.data(), rot_b_s.data(), n, 0.28, -0.96);

    kern::set_backend(kern::Backend::Avx2);
    CHECK(kern::dot(x.data(), y.data(), n) == dot_s);
    CHECK(kern::dot3(w.data(), x.data(), y.data(), n) == dot3_s);
    CHECK(kern::sum(x.data(), n) == sum_s);
    auto axpy_v = y;
    kern::axpy(0.7, x.data(), axpy_v.data(), n);
    CHECK(axpy_v == axpy_s);
    auto rot_a_v = x, rot_b_v = y;
    kern::rotate_pair(rot_a_v.data(), rot_b_v.data(), n, 0.28, -0.96);
    CHECK(rot_a_v == rot_a_s);
    CHECK(rot_b_v == rot_b_s);
  }

  for (std::size_t rows : {1u, 3u, 5u}) {
    for (std::size_t cols : {1u, 4u, 7u, 19u}) {
      const auto a = random_vec(rng, rows * cols);
      const auto x = random_vec(rng, cols);
      std::vector<double> y_s(rows), y_v(rows);
      kern::set_backend(kern::Backend::Scalar);
      kern::matvec(a.data(), x.data(), y_s.data(), rows, cols);
      kern::set_backend(kern::Backend::Avx2);
      kern::matvec(a.data(), x.data(), y_v.data(), rows, cols);
      CHECK(y_v == y_s);
    }
  }
}
