#include "gmlm/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace gmlm::kern {

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += x[i] * y[i];
    a1 += x[i + 1] * y[i + 1];
    a2 += x[i + 2] * y[i + 2];
    a3 += x[i + 3] * y[i + 3];
  }
  double r = (a0 + a2) + (a1 + a3);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

double dot3(const double* w, const double* x, const double* y, std::size_t n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += w[i] * x[i] * y[i];
    a1 += w[i + 1] * x[i + 1] * y[i + 1];
    a2 += w[i + 2] * x[i + 2] * y[i + 2];
    a3 += w[i + 3] * x[i + 3] * y[i + 3];
  }
  double r = (a0 + a2) + (a1 + a3);
  for (; i < n; ++i) r += w[i] * x[i] * y[i];
  return r;
}

double sum(const double* x, std::size_t n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += x[i];
    a1 += x[i + 1];
    a2 += x[i + 2];
    a3 += x[i + 3];
  }
  double r = (a0 + a2) + (a1 + a3);
  for (; i < n; ++i) r += x[i];
  return r;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void scal(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void rotate_pair(double* a, double* b, std::size_t n, double c, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    double ai = a[i], bi = b[i];
    a[i] = c * ai - s * bi;
    b[i] = s * ai + c * bi;
  }
}

void matvec(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

}  // namespace scalar

#if GMLM_HAVE_AVX2_TU
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
double dot3(const double* w, const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scal(double a, double* x, std::size_t n);
void rotate_pair(double* a, double* b, std::size_t n, double c, double s);
void matvec(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols);
}  // namespace avx2
#endif

namespace {

struct Vtable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*dot3)(const double*, const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scal)(double, double*, std::size_t);
  void (*rotate_pair)(double*, double*, std::size_t, double, double);
  void (*matvec)(const double*, const double*, double*, std::size_t, std::size_t);
  const char* name;
};

constexpr Vtable kScalar{scalar::dot,  scalar::dot3, scalar::sum,    scalar::axpy,
                         scalar::scal, scalar::rotate_pair, scalar::matvec, "scalar"};

#if GMLM_HAVE_AVX2_TU
constexpr Vtable kAvx2{avx2::dot,  avx2::dot3, avx2::sum,    avx2::axpy,
                       avx2::scal, avx2::rotate_pair, avx2::matvec, "avx2"};
#endif

bool probe_avx2() {
#if GMLM_HAVE_AVX2_TU
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const Vtable* pick(Backend b) {
#if GMLM_HAVE_AVX2_TU
  if (b == Backend::Avx2 || (b == Backend::Auto && probe_avx2())) return &kAvx2;
#else
  (void)b;
#endif
  return &kScalar;
}

// GMLM_BACKEND=scalar|avx2 overrides the startup choice; "avx2" is honored
// only when the CPU supports it, anything else falls back to auto.
Backend env_backend() {
  const char* env = std::getenv("GMLM_BACKEND");
  if (env == nullptr) return Backend::Auto;
  const std::string_view s(env);
  if (s == "scalar") return Backend::Scalar;
  if (s == "avx2" && probe_avx2()) return Backend::Avx2;
  return Backend::Auto;
}

const Vtable* g_vt = pick(env_backend());

}  // namespace

bool avx2_available() { return probe_avx2(); }
const char* backend_name() { return g_vt->name; }
void set_backend(Backend b) { g_vt = pick(b); }

double dot(const double* x, const double* y, std::size_t n) { return g_vt->dot(x, y, n); }
double dot3(const double* w, const double* x, const double* y, std::size_t n) {
  return g_vt->dot3(w, x, y, n);
}
double sum(const double* x, std::size_t n) { return g_vt->sum(x, n); }
void axpy(double a, const double* x, double* y, std::size_t n) { g_vt->axpy(a, x, y, n); }
void scal(double a, double* x, std::size_t n) { g_vt->scal(a, x, n); }
void rotate_pair(double* a, double* b, std::size_t n, double c, double s) {
  g_vt->rotate_pair(a, b, n, c, s);
}
void matvec(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols) {
  g_vt->matvec(a, x, y, rows, cols);
}

}  // namespace gmlm::kern
