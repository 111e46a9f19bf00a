#pragma once

#include <functional>
#include <utility>

#include "qkpse/fock.hpp"
#include "qkpse/gaussian.hpp"
#include "qkpse/types.hpp"

namespace qkpse {

// An evaluable quasi-probability density over m complex points, a density
// with respect to d^2 alpha per mode, with negativity and range metadata.
struct PqdFunction {
  int modes = 1;
  std::function<double(const CVec&)> eval;
  double neg_volume = 1.0;                  // integral of |W|
  std::pair<double, double> range{0.0, 0.0};  // (min, max), possibly bounds
  double envelope_sigma = 1.0;  // |W| is negligible outside radius 6*envelope_sigma
};

struct PointOperator {
  double s = 0.0;
  cplx center = 0.0;
  int cutoff = 0;
  CMat matrix;
};

// Truncation of Delta^{(s)}(alpha) built from its spectral form over
// displaced number states, with exact displacement matrix elements and an
// internally padded basis. s >= 1 is rejected (singular regime); for s > 0
// the operator has unbounded spectrum and only traces against states with
// fast-decaying photon content are meaningful.
PointOperator single_mode_point_operator(double s, cplx alpha, int cutoff);

// Tr[op . prod_j Delta^{(s_j)}(alpha_j)] on the truncated space. Sets
// *truncation_warning when the operator's trace deficit exceeds 1e-8.
double spqd_from_fock_operator(const FockOperator& op, const OrderingVector& s,
                               const CVec& alpha, bool* truncation_warning = nullptr);

// Closed form for the s-PQD of a single lossy photon.
double spqd_lossy_single_photon(double eta, double s, cplx alpha);

// 1 when s <= 1 - 2 eta, else (4 eta/(1-s)) exp((1-s-2 eta)/(2 eta)) - 1.
double negvol_lossy_single_photon(double eta, double s);

struct SinglePhotonExtrema {
  double at_origin = 0.0;     // W^{(-s)}(0)
  double at_ring = 0.0;       // W^{(-s)} at the interior extremum
  double ring_radius_sq = 0.0;
  bool has_ring = false;      // degenerate-extremum flag when radius^2 <= 0
};

// Extremal values of the (-s)-ordered lossy single-photon PQD as written in
// the closed form (ring radius from the stationary point of the prefactor).
SinglePhotonExtrema extrema_lossy_single_photon(double eta, double s);

// Lossy cat-state s-PQD: two Gaussian lobes at +-sqrt(eta) gamma plus the
// interference term damped by exp(-2|gamma|^2).
double spqd_lossy_cat(cplx gamma, double eta, double s, cplx alpha);

// s-PQD of a Fock state |n><n| (closed Laguerre form).
double spqd_fock_state(int n, double s, cplx alpha);

// 4^m * normal density of (2 Re alpha, 2 Im alpha, ...) under
// (mean, cov - diag(s)); requires cov - diag(s) positive definite.
double spqd_gaussian(const GaussianState& g, const OrderingVector& s, const CVec& alpha);

// Adaptive polar quadrature of the negative volume of a single-mode PQD.
double negvol_numeric(const PqdFunction& p, double envelope_sigma, double tol);

// (2/(t_min+1)) prod_j 2/(t_j+1); requires every t_j >= 0. The bound already
// carries the pi^m factor of the range convention.
double povm_range_bound(const OrderingVector& t);

// Single-mode interval [-2(1-t)/(pi (1+t)^2), 2/(pi (1+t))] for the values of
// a (-t)-ordered PQD of an operator with norm at most 1, t >= 0.
std::pair<double, double> single_mode_povm_interval(double t);

// W^{(s)}_Pi(alpha) for a single-mode POVM element given as a Fock matrix.
// Diagonal elements use the closed Laguerre form; general Hermitian matrices
// fall back to displaced-number-state sums.
class PovmPqd {
 public:
  PovmPqd(CMat pi, double s);
  double operator()(cplx alpha) const;
  std::pair<double, double> value_interval() const;  // actual extrema over the plane

 private:
  CMat pi_;
  Vec diag_;
  double s_ = 0.0;
  bool diagonal_ = false;
  mutable std::pair<double, double> interval_{0.0, 0.0};
  mutable bool interval_ready_ = false;
};

// Closed-form PQD families for the supported input states, with negativity
// and range metadata attached (cat metadata is computed numerically once).
PqdFunction family_pqd(const InputStateSpec& spec, double s);

}  // namespace qkpse
