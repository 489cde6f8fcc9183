#include "gmlm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gmlm/kernels.hpp"

namespace gmlm {

SymMatrix SymMatrix::identity(int d) {
  SymMatrix m(d);
  for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
  return m;
}

double SymMatrix::frobenius() const { return std::sqrt(kern::dot(a.data(), a.data(), a.size())); }

SymMatrix SymMatrix::scaled(double s) const {
  SymMatrix r = *this;
  kern::scal(s, r.a.data(), r.a.size());
  return r;
}

SymMatrix SymMatrix::minus(const SymMatrix& other) const {
  require(dim == other.dim, ErrKind::Validation, "matrix dimension mismatch");
  SymMatrix r = *this;
  kern::axpy(-1.0, other.a.data(), r.a.data(), r.a.size());
  return r;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim; ++i) t += at(i, i);
  return t;
}

namespace {

double off_diagonal_norm(const SymMatrix& w) {
  double s = 0.0;
  for (int i = 0; i < w.dim; ++i)
    for (int j = 0; j < w.dim; ++j)
      if (i != j) s += w.at(i, j) * w.at(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigen(const SymMatrix& m, const JacobiOptions& opts) {
  const int d = m.dim;
  require(d >= 1, ErrKind::Validation, "jacobi_eigen: empty matrix");
  require(d <= 8192, ErrKind::Capacity, "jacobi_eigen: dimension exceeds 8192");
  for (double v : m.a)
    require(std::isfinite(v), ErrKind::Validation, "jacobi_eigen: non-finite entry");
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      require(m.at(i, j) == m.at(j, i), ErrKind::Validation, "jacobi_eigen: matrix not symmetric");

  SymMatrix w = m;
  // Eigenvector candidates kept as rows so rotations touch contiguous memory;
  // transposed into column layout at the end.
  std::vector<double> vt(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) vt[static_cast<std::size_t>(i) * d + i] = 1.0;

  const double norm_a = m.frobenius();
  const double target = opts.tol_factor * norm_a;

  int sweeps = 0;
  double off = off_diagonal_norm(w);
  while (off > target && sweeps < opts.max_sweeps) {
    for (int p = 0; p < d - 1; ++p) {
      for (int q = p + 1; q < d; ++q) {
        const double apq = w.at(p, q);
        if (apq == 0.0) continue;
        const double app = w.at(p, p);
        const double aqq = w.at(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        double* rp = &w.a[static_cast<std::size_t>(p) * d];
        double* rq = &w.a[static_cast<std::size_t>(q) * d];
        kern::rotate_pair(rp, rq, static_cast<std::size_t>(d), c, s);
        // Closed forms for the 2x2 block; rotate_pair only applied the
        // one-sided update there.
        rp[p] = app - t * apq;
        rq[q] = aqq + t * apq;
        rp[q] = 0.0;
        rq[p] = 0.0;
        // Mirror rows into columns to keep exact symmetry.
        for (int i = 0; i < d; ++i) {
          if (i == p || i == q) continue;
          w.at(i, p) = rp[i];
          w.at(i, q) = rq[i];
        }
        kern::rotate_pair(&vt[static_cast<std::size_t>(p) * d], &vt[static_cast<std::size_t>(q) * d],
                          static_cast<std::size_t>(d), c, s);
      }
    }
    ++sweeps;
    off = off_diagonal_norm(w);
  }

  if (off > target)
    throw Error(ErrKind::Numeric, "jacobi_eigen: not converged after " +
                                      std::to_string(opts.max_sweeps) +
                                      " sweeps, off-diagonal residual " + std::to_string(off));

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return w.at(i, i) > w.at(j, j); });

  EigenDecomposition e;
  e.dim = d;
  e.sweeps = sweeps;
  e.off_residual = off;
  e.values.resize(d);
  e.vectors.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int j = 0; j < d; ++j) {
    e.values[j] = w.at(order[j], order[j]);
    for (int i = 0; i < d; ++i)
      e.vectors[static_cast<std::size_t>(i) * d + j] = vt[static_cast<std::size_t>(order[j]) * d + i];
  }
  return e;
}

SymMatrix invert_spd(const SymMatrix& m) {
  EigenDecomposition e = jacobi_eigen(m);
  const int d = m.dim;
  const double eigmin = e.values.back();
  if (eigmin <= 1e-10)
    throw Error(ErrKind::Numeric,
                "invert_spd: matrix not positive definite within tolerance, eigmin = " +
                    std::to_string(eigmin));

  SymMatrix inv(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k)
        s += e.vectors[static_cast<std::size_t>(i) * d + k] *
             e.vectors[static_cast<std::size_t>(j) * d + k] / e.values[k];
      inv.set_sym(i, j, s);
    }
  }

  // Residual check on A * A^-1.
  double resid = 0.0;
  std::vector<double> row(d);
  for (int i = 0; i < d; ++i) {
    kern::matvec(inv.a.data(), &m.a[static_cast<std::size_t>(i) * d], row.data(), d, d);
    for (int j = 0; j < d; ++j) {
      const double r = row[j] - (i == j ? 1.0 : 0.0);
      resid += r * r;
    }
  }
  resid = std::sqrt(resid);
  if (resid > 1e-8)
    throw Error(ErrKind::Numeric,
                "invert_spd: inverse residual " + std::to_string(resid) + " exceeds 1e-8");
  return inv;
}

double psd_gap(const SymMatrix& m) { return jacobi_eigen(m).values.back(); }

std::vector<double> finite_diff_gradient(const std::function<double(const std::vector<double>&)>& f,
                                         const std::vector<double>& x, double h) {
  require(h > 0.0, ErrKind::Validation, "finite_diff_gradient: step must be positive");
  std::vector<double> g(x.size());
  std::vector<double> xp = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    xp[i] = xi + h;
    const double fp = f(xp);
    xp[i] = xi - h;
    const double fm = f(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

void FiniteDistribution::validate() const {
  require(!p.empty(), ErrKind::Validation, "distribution: empty support");
  for (double v : p)
    require(std::isfinite(v) && v >= 0.0, ErrKind::Validation,
            "distribution: entries must be finite and nonnegative");
  const double s = kern::sum(p.data(), p.size());
  require(std::abs(s - 1.0) <= 1e-12, ErrKind::Validation,
          "distribution: probabilities sum to " + std::to_string(s));
}

std::size_t FiniteDistribution::sample(RngStream& rng) const {
  const double u = rng.uniform01();
  double c = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) last_positive = i;
    c += p[i];
    if (u < c) return i;
  }
  return last_positive;
}

double tv_distance(const FiniteDistribution& a, const FiniteDistribution& b) {
  require(a.size() == b.size(), ErrKind::Validation, "tv_distance: support mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.p[i] - b.p[i]);
  return 0.5 * s;
}

double kl_divergence(const FiniteDistribution& a, const FiniteDistribution& b) {
  require(a.size() == b.size(), ErrKind::Validation, "kl_divergence: support mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.p[i] == 0.0) continue;
    if (b.p[i] == 0.0) return std::numeric_limits<double>::infinity();
    s += a.p[i] * std::log(a.p[i] / b.p[i]);
  }
  return s;
}

void LogSumExp::add(double logv) {
  const double ninf = -std::numeric_limits<double>::infinity();
  if (empty_) {
    max_ = logv;
    sum_ = (logv == ninf) ? 0.0 : 1.0;
    empty_ = false;
    return;
  }
  if (logv <= max_) {
    if (logv != ninf) sum_ += std::exp(logv - max_);
    return;
  }
  sum_ *= std::exp(max_ - logv);
  max_ = logv;
  sum_ += 1.0;
}

double LogSumExp::value() const {
  if (empty_ || sum_ == 0.0) return -std::numeric_limits<double>::infinity();
  return max_ + std::log(sum_);
}

}  // namespace gmlm
