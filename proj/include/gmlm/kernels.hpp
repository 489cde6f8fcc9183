#pragma once

#include <cstddef>

// Dense arithmetic kernels with a scalar reference implementation and an AVX2
// variant selected at runtime. Every reduction uses the same fixed order: four
// stride-4 partial accumulators combined as (a0+a2) + (a1+a3), then the tail
// folded sequentially. No FMA. Under -ffp-contract=off both backends produce
// bit-identical results, so runtime dispatch cannot perturb output bytes.
namespace gmlm::kern {

enum class Backend { Auto, Scalar, Avx2 };

double dot(const double* x, const double* y, std::size_t n);
double dot3(const double* w, const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);
void scal(double a, double* x, std::size_t n);
// (a_i, b_i) <- (c*a_i - s*b_i, s*a_i + c*b_i)
void rotate_pair(double* a, double* b, std::size_t n, double c, double s);
// y = A x, A row-major rows x cols
void matvec(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols);

bool avx2_available();
const char* backend_name();
// Test hook; Auto re-probes the CPU.
void set_backend(Backend b);

}  // namespace gmlm::kern
