#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "gmlm/errors.hpp"
#include "gmlm/rng.hpp"

namespace gmlm {

// Dense symmetric matrix, full row-major storage. Writes go through set_sym
// so both triangles stay exactly equal.
struct SymMatrix {
  int dim = 0;
  std::vector<double> a;  // dim*dim

  SymMatrix() = default;
  explicit SymMatrix(int d) : dim(d), a(static_cast<std::size_t>(d) * d, 0.0) {}

  static SymMatrix identity(int d);

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * dim + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * dim + j]; }
  void set_sym(int i, int j, double v) {
    at(i, j) = v;
    if (i != j) at(j, i) = v;
  }
  void add_sym(int i, int j, double v) {
    at(i, j) += v;
    if (i != j) at(j, i) += v;
  }

  double frobenius() const;
  SymMatrix scaled(double s) const;
  SymMatrix minus(const SymMatrix& other) const;
  double trace() const;
};

struct EigenDecomposition {
  int dim = 0;
  std::vector<double> values;   // descending
  std::vector<double> vectors;  // row-major; column j is the eigenvector of values[j]
  int sweeps = 0;
  double off_residual = 0.0;
};

struct JacobiOptions {
  double tol_factor = 1e-13;  // converged when off-diagonal Frobenius <= tol_factor * ||A||_F
  int max_sweeps = 100;
};

// Cyclic Jacobi rotations. dim capped at 8192.
EigenDecomposition jacobi_eigen(const SymMatrix& m, const JacobiOptions& opts = {});

// Inverse via eigendecomposition. Requires eigmin > 1e-10; the product
// residual ||A A^-1 - I||_F must come out <= 1e-8 or a numeric error is
// raised carrying the residual.
SymMatrix invert_spd(const SymMatrix& m);

// Smallest eigenvalue (>= -tol tests for positive semidefiniteness).
double psd_gap(const SymMatrix& m);

// Central differences, absolute step h per coordinate.
std::vector<double> finite_diff_gradient(const std::function<double(const std::vector<double>&)>& f,
                                         const std::vector<double>& x, double h);

// Probability vector over {0, ..., size-1}: entries >= 0, sum within 1e-12 of 1.
struct FiniteDistribution {
  std::vector<double> p;

  std::size_t size() const { return p.size(); }
  void validate() const;
  // Inverse-CDF draw consuming one uniform.
  std::size_t sample(RngStream& rng) const;
};

double tv_distance(const FiniteDistribution& a, const FiniteDistribution& b);
// Natural log; 0 log(0/q) := 0; p>0 with q==0 yields +infinity.
double kl_divergence(const FiniteDistribution& a, const FiniteDistribution& b);

// Streaming log-sum-exp accumulator with a fixed left-to-right order.
class LogSumExp {
 public:
  void add(double logv);
  double value() const;

 private:
  bool empty_ = true;
  double max_ = 0.0;
  double sum_ = 0.0;  // sum of exp(logv - max_)
};

}  // namespace gmlm
