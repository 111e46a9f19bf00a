#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qkpse {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

// Per-mode ordering parameters, the diagonal of the ordering matrix.
// s = 0 is Wigner, s = -1 is Husimi; s >= 1 (Glauber-Sudarshan) is rejected.
struct OrderingVector {
  Vec s;

  OrderingVector() = default;
  explicit OrderingVector(Vec values);
  static OrderingVector uniform(int modes, double s);

  int modes() const { return static_cast<int>(s.size()); }
  double operator[](int j) const { return s[j]; }
};

// Unitary (or sub-unitary, for lossy composites) transfer matrix of a
// linear optical network. Convention: a network V maps a coherent row
// vector gamma to gamma * V.
struct TransferMatrix {
  CMat V;

  TransferMatrix() = default;
  explicit TransferMatrix(CMat m);

  int dim() const { return static_cast<int>(V.rows()); }
  bool is_unitary(double tol = 1e-10) const;
};

// Per-mode transmissivities of a product loss channel.
struct LossVector {
  Vec eta;

  LossVector() = default;
  explicit LossVector(Vec values);
  static LossVector uniform(int modes, double eta);

  int modes() const { return static_cast<int>(eta.size()); }
  double operator[](int j) const { return eta[j]; }
};

// One input port of a data-encoding network: a state family plus the
// loss folded in front of the network.
struct InputStateSpec {
  enum class Kind { Vacuum, SinglePhoton, Cat, Coherent, Thermal, Fock };

  Kind kind = Kind::Vacuum;
  cplx gamma = 0.0;   // Cat / Coherent amplitude
  double nbar = 0.0;  // Thermal mean photon number
  int n = 0;          // Fock photon number
  double eta = 1.0;   // loss transmissivity in [0, 1]

  static InputStateSpec vacuum(double eta = 1.0);
  static InputStateSpec single_photon(double eta = 1.0);
  static InputStateSpec cat(cplx gamma, double eta = 1.0);
  static InputStateSpec coherent(cplx gamma, double eta = 1.0);
  static InputStateSpec thermal(double nbar, double eta = 1.0);
  static InputStateSpec fock(int n, double eta = 1.0);

  void validate() const;
};

}  // namespace qkpse
