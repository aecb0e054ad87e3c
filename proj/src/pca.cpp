#include "seqlab/pca.hpp"

#include <algorithm>
#include <cmath>

#include "seqlab/errors.hpp"
#include "seqlab/linalg.hpp"

namespace seqlab {

std::vector<double> pca_explained_variance(const DenseMatrix& points) {
  const std::size_t t_len = points.rows;
  const std::size_t d = points.cols;
  if (t_len < 2) throw NumericError("pca: need at least 2 points");
  if (d == 0) throw NumericError("pca: zero-dimensional points");

  std::vector<double> mean(d, 0.0);
  for (std::size_t t = 0; t < t_len; ++t) {
    const double* p = points.row(t);
    for (std::size_t c = 0; c < d; ++c) mean[c] += p[c];
  }
  for (auto& m : mean) m /= static_cast<double>(t_len);

  DenseMatrix cov(d, d, 0.0);
  std::vector<double> centered(d);
  for (std::size_t t = 0; t < t_len; ++t) {
    const double* p = points.row(t);
    for (std::size_t c = 0; c < d; ++c) centered[c] = p[c] - mean[c];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) cov(i, j) += centered[i] * centered[j];
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      const double v = cov(i, j) / static_cast<double>(t_len - 1);
      cov(i, j) = v;
      cov(j, i) = v;
    }

  std::vector<double> eig = symmetric_eigenvalues(cov);
  for (auto& e : eig) e = std::max(e, 0.0);  // clamp roundoff negatives
  std::sort(eig.begin(), eig.end(), std::greater<double>());
  double total = 0.0;
  for (double e : eig) total += e;
  if (!(total > 0.0)) throw NumericError("pca: zero total variance");
  for (auto& e : eig) e /= total;
  return eig;
}

}  // namespace seqlab
