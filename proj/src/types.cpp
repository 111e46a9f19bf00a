#include "qkpse/types.hpp"

#include <cmath>

#include "qkpse/errors.hpp"

namespace qkpse {

OrderingVector::OrderingVector(Vec values) : s(std::move(values)) {
  // entries below -1 arise from the loss transform (extra Gaussian
  // smoothing past the Husimi point) and stay well defined; beyond 1 lies
  // the singular Glauber-Sudarshan side. State-side evaluators reject
  // s >= 1 themselves; t = 1 remains a valid POVM-side ordering.
  for (int j = 0; j < s.size(); ++j) {
    if (!std::isfinite(s[j]) || s[j] > 1.0)
      throw ValidationError("ordering parameter must be finite and at most 1");
  }
}

OrderingVector OrderingVector::uniform(int modes, double s) {
  return OrderingVector(Vec::Constant(modes, s));
}

TransferMatrix::TransferMatrix(CMat m) : V(std::move(m)) {
  if (V.rows() != V.cols()) throw ValidationError("transfer matrix must be square");
  const double norm = V.operatorNorm();
  if (norm > 1.0 + 1e-10) throw ValidationError("transfer matrix norm exceeds 1");
}

bool TransferMatrix::is_unitary(double tol) const {
  const int m = dim();
  return (V * V.adjoint() - CMat::Identity(m, m)).cwiseAbs().maxCoeff() <= tol;
}

LossVector::LossVector(Vec values) : eta(std::move(values)) {
  for (int j = 0; j < eta.size(); ++j) {
    if (!std::isfinite(eta[j]) || eta[j] < 0.0 || eta[j] > 1.0)
      throw ValidationError("loss transmissivity out of [0, 1]");
  }
}

LossVector LossVector::uniform(int modes, double eta) {
  return LossVector(Vec::Constant(modes, eta));
}

InputStateSpec InputStateSpec::vacuum(double eta) {
  InputStateSpec s;
  s.kind = Kind::Vacuum;
  s.eta = eta;
  s.validate();
  return s;
}

InputStateSpec InputStateSpec::single_photon(double eta) {
  InputStateSpec s;
  s.kind = Kind::SinglePhoton;
  s.eta = eta;
  s.validate();
  return s;
}

InputStateSpec InputStateSpec::cat(cplx gamma, double eta) {
  InputStateSpec s;
  s.kind = Kind::Cat;
  s.gamma = gamma;
  s.eta = eta;
  s.validate();
  return s;
}

InputStateSpec InputStateSpec::coherent(cplx gamma, double eta) {
  InputStateSpec s;
  s.kind = Kind::Coherent;
  s.gamma = gamma;
  s.eta = eta;
  s.validate();
  return s;
}

InputStateSpec InputStateSpec::thermal(double nbar, double eta) {
  InputStateSpec s;
  s.kind = Kind::Thermal;
  s.nbar = nbar;
  s.eta = eta;
  s.validate();
  return s;
}

InputStateSpec InputStateSpec::fock(int n, double eta) {
  InputStateSpec s;
  s.kind = Kind::Fock;
  s.n = n;
  s.eta = eta;
  s.validate();
  return s;
}

void InputStateSpec::validate() const {
  if (!std::isfinite(eta) || eta < 0.0 || eta > 1.0)
    throw ValidationError("input loss transmissivity out of [0, 1]");
  if (!std::isfinite(gamma.real()) || !std::isfinite(gamma.imag()))
    throw ValidationError("non-finite amplitude");
  if (!std::isfinite(nbar) || nbar < 0.0) throw ValidationError("negative thermal occupation");
  if (n < 0) throw ValidationError("negative photon number");
}

}  // namespace qkpse
