#pragma once

#include <functional>
#include <span>
#include <vector>

#include "seqlab/matrix.hpp"

namespace seqlab {

// Row-wise softmax with max-subtraction. Throws NumericError naming the row
// index if it holds a non-finite entry.
DenseMatrix softmax_rows(const DenseMatrix& m);

// In-place softmax of one row of length n (no finiteness check).
void softmax_inplace(double* v, std::size_t n);

// log sum_i exp(v_i), max-subtracted. Throws NumericError on empty input.
double logsumexp(std::span<const double> v);

// Central finite differences (f(x+eps e_i) - f(x-eps e_i)) / (2 eps).
// Throws NumericError naming the coordinate if f returns a non-finite value.
std::vector<double> finite_diff_grad(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double eps);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);
// Upper tail Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);
// Chi-square survival function P(X > x) with dof degrees of freedom.
double chi_square_sf(double x, double dof);

}  // namespace seqlab
