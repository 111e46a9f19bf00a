#pragma once

#include "qkpse/rng.hpp"
#include "qkpse/types.hpp"

namespace qkpse {

// Associated Laguerre polynomial L_n^{(a)}(x) via the three-term recurrence.
double laguerre(int n, int a, double x);

double log_factorial(int n);

double binomial(int n, int k);

// Exact matrix elements <m|D(alpha)|n> of the displacement operator on a
// dim-dimensional Fock truncation (projection of the true operator, not the
// exponential of the truncated generator).
CMat displacement_matrix(cplx alpha, int dim);

// Haar-random unitary from QR of a complex Gaussian matrix with phase fix.
CMat haar_unitary(int dim, Rng& rng);

// Fock amplitudes of |gamma> up to cutoff-1.
CVec coherent_amplitudes(cplx gamma, int cutoff);

// Fock amplitudes of the squeezed vacuum with cov diag(e^{2r}, e^{-2r}).
CVec squeezed_amplitudes(double r, int cutoff);

}  // namespace qkpse
