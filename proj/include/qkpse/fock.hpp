#pragma once

#include <utility>
#include <vector>

#include "qkpse/types.hpp"

namespace qkpse {

// Operator on a truncated multimode Fock space, d^m x d^m with d = cutoff.
// The flattened index of (n_1, ..., n_m) is n_1 d^{m-1} + ... + n_m.
struct FockOperator {
  int modes = 0;
  int cutoff = 0;
  CMat matrix;
  double trace_deficit = 0.0;  // trace lost to the truncation, for states
  bool sector_overflow = false;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

std::vector<int> unflatten_index(int idx, int modes, int cutoff);
int flatten_index(const std::vector<int>& occ, int cutoff);

// Tensor product of per-mode densities for the supported input families.
FockOperator fock_density(const std::vector<InputStateSpec>& inputs, int cutoff);

// Truncated Fock representation of the network unitary; amplitudes between
// equal-photon-number patterns are permanents of row/column-repeated
// submatrices of V. Blocks with total photon number >= cutoff are flagged.
FockOperator lon_fock_unitary(const TransferMatrix& V, int modes, int cutoff);

// rho -> U rho U^dagger for the network V
FockOperator conjugate_lon(const FockOperator& rho, const TransferMatrix& V);

FockOperator apply_loss_kraus(const FockOperator& rho, const LossVector& eta, int cutoff);

// Heralded single-mode state from measuring |herald_n> on one arm of a
// two-mode squeezed state, together with the heralding probability.
std::pair<FockOperator, double> tms_heralded_state(double lambda, int herald_n, int cutoff);

FockOperator tms_density(double lambda, int cutoff);
FockOperator pure_state_density(const CVec& amplitudes, int modes, int cutoff);
FockOperator fock_projector(int n, int cutoff);

double trace_of(const FockOperator& op);
double overlap_trace(const FockOperator& a, const FockOperator& b);  // Re Tr[a b]

// Tr[rho1 rho2] / (Tr[rho1] Tr[rho2])
double exact_kernel(const FockOperator& rho1, const FockOperator& rho2);

// Oracle entry point for PQD validation; delegates to the phase-space module.
double pqd_check(const FockOperator& rho, const OrderingVector& s, const CVec& alpha);

}  // namespace qkpse
