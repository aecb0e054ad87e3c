#pragma once

#include <vector>

#include "seqlab/matrix.hpp"

namespace seqlab {

// Eigenvalues of the sample covariance of mean-centered points, sorted
// descending and normalized to sum to 1. Requires T >= 2 rows; throws
// NumericError on zero total variance (constant data).
std::vector<double> pca_explained_variance(const DenseMatrix& points);

}  // namespace seqlab
