#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace seqlab {

// Dense row-major matrix of doubles. Shared container for weights, state
// trajectories, probability tables.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, data.size() == rows * cols

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  bool all_finite() const {
    for (double v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

// y = A x, A (m x n), x length n, y length m. y must not alias x.
inline void matvec(const DenseMatrix& a, const double* x, double* y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    const double* row = a.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

// y += A^T x, A (m x n), x length m, y length n.
inline void matTvec_add(const DenseMatrix& a, const double* x, double* y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    const double* row = a.row(r);
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (std::size_t c = 0; c < a.cols; ++c) y[c] += row[c] * xr;
  }
}

// A += u v^T, u length rows, v length cols.
inline void outer_add(DenseMatrix& a, const double* u, const double* v) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    double* row = a.row(r);
    const double ur = u[r];
    if (ur == 0.0) continue;
    for (std::size_t c = 0; c < a.cols; ++c) row[c] += ur * v[c];
  }
}

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols, a.rows);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) t(c, r) = a(r, c);
  return t;
}

}  // namespace seqlab
