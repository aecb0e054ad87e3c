#include "seqlab/linalg.hpp"

#include <cmath>
#include <string>

#include "seqlab/errors.hpp"

namespace seqlab {

DenseMatrix cholesky(const DenseMatrix& a) {
  if (a.rows != a.cols) throw NumericError("cholesky: matrix not square");
  const std::size_t n = a.rows;
  DenseMatrix l(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = a(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(acc > 0.0) || !std::isfinite(acc))
          throw NumericError("cholesky: matrix not positive definite at pivot " +
                             std::to_string(i));
        l(i, i) = std::sqrt(acc);
      } else {
        l(i, j) = acc / l(j, j);
      }
    }
  }
  return l;
}

void forward_subst(const DenseMatrix& lower, const double* b, double* y) {
  const std::size_t n = lower.rows;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = b[i];
    const double* row = lower.row(i);
    for (std::size_t k = 0; k < i; ++k) acc -= row[k] * y[k];
    y[i] = acc / row[i];
  }
}

void backward_subst_transposed(const DenseMatrix& lower, const double* y, double* x) {
  const std::size_t n = lower.rows;
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) acc -= lower(k, ii) * x[k];
    x[ii] = acc / lower(ii, ii);
  }
}

std::vector<double> chol_solve(const DenseMatrix& lower, const double* b) {
  const std::size_t n = lower.rows;
  std::vector<double> y(n), x(n);
  forward_subst(lower, b, y.data());
  backward_subst_transposed(lower, y.data(), x.data());
  return x;
}

DenseMatrix spd_inverse(const DenseMatrix& a) {
  const DenseMatrix l = cholesky(a);
  const std::size_t n = a.rows;
  DenseMatrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const std::vector<double> col = chol_solve(l, e.data());
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  // enforce symmetry lost to roundoff
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  return inv;
}

double chol_log_det(const DenseMatrix& lower) {
  double acc = 0.0;
  for (std::size_t i = 0; i < lower.rows; ++i) acc += std::log(lower(i, i));
  return 2.0 * acc;
}

std::vector<double> symmetric_eigenvalues(DenseMatrix a) {
  if (a.rows != a.cols)
    throw NumericError("symmetric_eigenvalues: matrix not square");
  const std::size_t n = a.rows;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  return eig;
}

}  // namespace seqlab
