#include "seqlab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seqlab/errors.hpp"

namespace seqlab {

DenseMatrix softmax_rows(const DenseMatrix& m) {
  if (m.empty()) throw NumericError("softmax_rows: empty matrix");
  DenseMatrix out(m.rows, m.cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* in = m.row(r);
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (!std::isfinite(in[c]))
        throw NumericError("softmax_rows: non-finite entry in row " +
                           std::to_string(r));
    }
    double* o = out.row(r);
    std::copy(in, in + m.cols, o);
    softmax_inplace(o, m.cols);
  }
  return out;
}

void softmax_inplace(double* v, std::size_t n) {
  double mx = v[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, v[i]);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::exp(v[i] - mx);
    total += v[i];
  }
  for (std::size_t i = 0; i < n; ++i) v[i] /= total;
}

double logsumexp(std::span<const double> v) {
  if (v.empty()) throw NumericError("logsumexp: empty vector");
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (mx == -std::numeric_limits<double>::infinity()) return mx;
  double total = 0.0;
  for (double x : v) total += std::exp(x - mx);
  return mx + std::log(total);
}

std::vector<double> finite_diff_grad(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double eps) {
  if (!(eps > 0.0)) throw NumericError("finite_diff_grad: eps must be > 0");
  std::vector<double> grad(x.size());
  std::vector<double> probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + eps;
    const double fp = f(probe);
    probe[i] = x[i] - eps;
    const double fm = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NumericError("finite_diff_grad: non-finite value at coordinate " +
                         std::to_string(i));
    grad[i] = (fp - fm) / (2.0 * eps);
  }
  return grad;
}

namespace {

// Series expansion for P(a,x), x < a + 1.
double gamma_p_series(double a, double x) {
  const double lga = std::lgamma(a);
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - lga);
}

// Continued fraction for Q(a,x), x >= a + 1 (modified Lentz).
double gamma_q_cf(double a, double x) {
  const double lga = std::lgamma(a);
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - lga) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw NumericError("gamma_p: need a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw NumericError("gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * x);
}

}  // namespace seqlab
