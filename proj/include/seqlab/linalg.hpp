#pragma once

#include <vector>

#include "seqlab/matrix.hpp"

namespace seqlab {

// Lower-triangular L with A = L L^T. Throws NumericError if A is not
// symmetric positive definite (within roundoff).
DenseMatrix cholesky(const DenseMatrix& a);

// Solve L y = b (forward substitution), L lower-triangular.
void forward_subst(const DenseMatrix& lower, const double* b, double* y);
// Solve L^T x = y (back substitution).
void backward_subst_transposed(const DenseMatrix& lower, const double* y, double* x);

// Solve A x = b via the Cholesky factor of A.
std::vector<double> chol_solve(const DenseMatrix& lower, const double* b);

// Inverse of an SPD matrix via Cholesky.
DenseMatrix spd_inverse(const DenseMatrix& a);

// log det A for SPD A given its Cholesky factor.
double chol_log_det(const DenseMatrix& lower);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, unsorted.
std::vector<double> symmetric_eigenvalues(DenseMatrix a);

}  // namespace seqlab
