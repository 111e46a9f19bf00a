#include "qkpse/special.hpp"

#include <cmath>

#include "qkpse/errors.hpp"

namespace qkpse {

double laguerre(int n, int a, double x) {
  if (n == 0) return 1.0;
  double lm1 = 1.0;
  double l = 1.0 + a - x;
  for (int k = 1; k < n; ++k) {
    const double lp1 = ((2.0 * k + 1.0 + a - x) * l - (k + a) * lm1) / (k + 1.0);
    lm1 = l;
    l = lp1;
  }
  return l;
}

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

CMat displacement_matrix(cplx alpha, int dim) {
  CMat d(dim, dim);
  const double x = std::norm(alpha);
  const double pref = std::exp(-0.5 * x);
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n <= m; ++n) {
      // <m|D|n> = sqrt(n!/m!) alpha^{m-n} e^{-|a|^2/2} L_n^{(m-n)}(|a|^2)
      const int k = m - n;
      const double mag = std::exp(0.5 * (log_factorial(n) - log_factorial(m)));
      const cplx pw = std::pow(alpha, k);
      const double lag = laguerre(n, k, x);
      d(m, n) = mag * pw * pref * lag;
      if (m != n) {
        // <n|D|m> = sqrt(n!/m!) (-conj(alpha))^{m-n} e^{-|a|^2/2} L_n^{(m-n)}
        d(n, m) = mag * std::pow(-std::conj(alpha), k) * pref * lag;
      }
    }
  }
  return d;
}

CMat haar_unitary(int dim, Rng& rng) {
  CMat z(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) z(i, j) = cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);
  Eigen::HouseholderQR<CMat> qr(z);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    cplx diag = r(j, j);
    cplx phase = (std::abs(diag) > 0.0) ? diag / std::abs(diag) : cplx(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

CVec coherent_amplitudes(cplx gamma, int cutoff) {
  CVec c(cutoff);
  const double pref = std::exp(-0.5 * std::norm(gamma));
  cplx term = pref;
  c[0] = term;
  for (int n = 1; n < cutoff; ++n) {
    term *= gamma / std::sqrt(static_cast<double>(n));
    c[n] = term;
  }
  return c;
}

CVec squeezed_amplitudes(double r, int cutoff) {
  CVec c = CVec::Zero(cutoff);
  const double t = std::tanh(r);
  const double pref = 1.0 / std::sqrt(std::cosh(r));
  // amplitude on |2n>: (tanh r)^n sqrt((2n)!)/(2^n n!)
  for (int n = 0; 2 * n < cutoff; ++n) {
    const double logc = 0.5 * log_factorial(2 * n) - n * std::log(2.0) - log_factorial(n);
    c[2 * n] = pref * std::pow(t, n) * std::exp(logc);
  }
  return c;
}

}  // namespace qkpse
