#include <immintrin.h>

#include <cstddef>

// AVX2 kernel variants. Accumulation order matches the scalar reference
// exactly: lane j of the vector accumulator is scalar partial a_j, and the
// horizontal combine (low128 + high128, then in-lane add) realizes
// (a0+a2) + (a1+a3). Multiplies and adds stay separate: no FMA, so results
// are bit-identical to the scalar backend.
namespace gmlm::kern::avx2 {

namespace {

inline double hcombine(__m256d acc) {
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d s = _mm_add_pd(lo, hi);  // (a0+a2, a1+a3)
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vy));
  }
  double r = hcombine(acc);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

double dot3(const double* w, const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vw = _mm256_loadu_pd(w + i);
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_mul_pd(vw, vx), vy));
  }
  double r = hcombine(acc);
  for (; i < n; ++i) r += w[i] * x[i] * y[i];
  return r;
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = hcombine(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void scal(double a, double* x, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void rotate_pair(double* a, double* b, std::size_t n, double c, double s) {
  __m256d vc = _mm256_set1_pd(c);
  __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d va = _mm256_loadu_pd(a + i);
    __m256d vb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(a + i, _mm256_sub_pd(_mm256_mul_pd(vc, va), _mm256_mul_pd(vs, vb)));
    _mm256_storeu_pd(b + i, _mm256_add_pd(_mm256_mul_pd(vs, va), _mm256_mul_pd(vc, vb)));
  }
  for (; i < n; ++i) {
    double ai = a[i], bi = b[i];
    a[i] = c * ai - s * bi;
    b[i] = s * ai + c * bi;
  }
}

void matvec(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

}  // namespace gmlm::kern::avx2
