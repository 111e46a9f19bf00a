#include <doctest.h>

#include <cmath>

#include "qkpse/errors.hpp"
#include "qkpse/fock.hpp"
#include "qkpse/gaussian.hpp"
#include "qkpse/phase_space.hpp"
#include "qkpse/rng.hpp"
#include "qkpse/sources.hpp"
#include "qkpse/special.hpp"

using namespace qkpse;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("input densities") {
  const FockOperator sp = fock_density({InputStateSpec::single_photon(0.5)}, 8);
  CHECK(sp.matrix(0, 0).real() == doctest::Approx(0.5));
  CHECK(sp.matrix(1, 1).real() == doctest::Approx(0.5));
  CHECK(trace_of(sp) == doctest::Approx(1.0));

  const FockOperator cat = fock_density({InputStateSpec::cat(1.0)}, 24);
  CHECK(trace_of(cat) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(overlap_trace(cat, cat) == doctest::Approx(1.0).epsilon(1e-10));  // pure

  const FockOperator th = fock_density({InputStateSpec::thermal(1.0)}, 60);
  CHECK(th.matrix(0, 0).real() == doctest::Approx(0.5));
  CHECK(th.matrix(1, 1).real() == doctest::Approx(0.25));
  CHECK(th.matrix(2, 2).real() == doctest::Approx(0.125));
}

TEST_CASE("network unitary: identity, Hong-Ou-Mandel, sector orthonormality") {
  const int cutoff = 5;
  const FockOperator id = lon_fock_unitary(TransferMatrix(CMat::Identity(2, 2)), 2, cutoff);
  CHECK((id.matrix - CMat::Identity(id.dim(), id.dim())).cwiseAbs().maxCoeff() < 1e-12);

  CMat bs(2, 2);
  bs << 1.0, 1.0, 1.0, -1.0;
  bs /= std::sqrt(2.0);
  const FockOperator u = lon_fock_unitary(TransferMatrix(bs), 2, cutoff);
  const int in11 = flatten_index({1, 1}, cutoff);
  const int out20 = flatten_index({2, 0}, cutoff);
  const int out02 = flatten_index({0, 2}, cutoff);
  CHECK(std::abs(u.matrix(in11, in11)) < 1e-12);  // photon bunching
  CHECK(std::abs(u.matrix(out20, in11)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(u.matrix(out02, in11)) == doctest::Approx(1.0 / std::sqrt(2.0)));

  // retained sectors are orthonormal
  Rng rng(5);
  const FockOperator hu = lon_fock_unitary(TransferMatrix(haar_unitary(2, rng)), 2, cutoff);
  for (int col = 0; col < hu.dim(); ++col) {
    const auto occ = unflatten_index(col, 2, cutoff);
    if (occ[0] + occ[1] > cutoff - 1) continue;
    for (int col2 = col; col2 < hu.dim(); ++col2) {
      const auto occ2 = unflatten_index(col2, 2, cutoff);
      if (occ2[0] + occ2[1] > cutoff - 1) continue;
      const cplx dot = hu.matrix.col(col).dot(hu.matrix.col(col2));
      CHECK(std::abs(dot - (col == col2 ? 1.0 : 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("coherent transport agrees between the Fock unitary and apply_lon") {
  Rng rng(6);
  const TransferMatrix v(haar_unitary(2, rng));
  CVec gamma(2);
  gamma << cplx(0.4, 0.1), cplx(-0.2, 0.3);
  const int cutoff = 14;
  const FockOperator in = fock_density(
      {InputStateSpec::coherent(gamma[0]), InputStateSpec::coherent(gamma[1])}, cutoff);
  const FockOperator out = conjugate_lon(in, v);

  // amplitude of mode annihilation from the density matrix
  auto mode_amp = [&](const FockOperator& rho, int mode) {
    cplx acc = 0.0;
    for (int i = 0; i < rho.dim(); ++i) {
      auto occ = unflatten_index(i, 2, cutoff);
      if (occ[mode] + 1 >= cutoff) continue;
      auto up = occ;
      up[mode] += 1;
      const int j = flatten_index(up, cutoff);
      acc += std::sqrt(static_cast<double>(occ[mode] + 1)) * rho.matrix(j, i);
    }
    return acc;  // Tr[rho a_mode^dagger] = <a^dagger> ; conj gives <a>
  };
  const CVec expect = v.V.transpose() * gamma;  // row gamma V
  for (int mode = 0; mode < 2; ++mode) {
    const cplx got = std::conj(mode_amp(out, mode));
    CHECK(got.real() == doctest::Approx(expect[mode].real()).epsilon(1e-8));
    CHECK(got.imag() == doctest::Approx(expect[mode].imag()).epsilon(1e-8));
  }
}

TEST_CASE("loss channel Kraus map") {
  const int cutoff = 10;
  const FockOperator one = fock_density({InputStateSpec::fock(1)}, cutoff);
  const FockOperator lossy = apply_loss_kraus(one, LossVector::uniform(1, 0.3), cutoff);
  CHECK(lossy.matrix(0, 0).real() == doctest::Approx(0.7));
  CHECK(lossy.matrix(1, 1).real() == doctest::Approx(0.3));

  // identity at eta = 1
  const FockOperator cat = fock_density({InputStateSpec::cat(1.2)}, cutoff);
  const FockOperator same = apply_loss_kraus(cat, LossVector::uniform(1, 1.0), cutoff);
  CHECK((same.matrix - cat.matrix).cwiseAbs().maxCoeff() < 1e-14);

  // trace preserved on retained sectors
  const FockOperator th = fock_density({InputStateSpec::thermal(0.6)}, 40);
  const FockOperator th_lossy = apply_loss_kraus(th, LossVector::uniform(1, 0.55), 40);
  CHECK(trace_of(th_lossy) == doctest::Approx(trace_of(th)).epsilon(1e-10));
  // and the result is the thermal state with scaled occupation
  const FockOperator th_direct = fock_density({InputStateSpec::thermal(0.6 * 0.55)}, 40);
  CHECK((th_lossy.matrix - th_direct.matrix).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("gaussian loss channel agrees with the covariance map") {
  // squeezed vacuum through loss, checked via the s-PQD at random points
  const double r = 0.5, eta = 0.65;
  const int cutoff = 30;
  const FockOperator sq = pure_state_density(squeezed_amplitudes(r, cutoff), 1, cutoff);
  const FockOperator lossy = apply_loss_kraus(sq, LossVector::uniform(1, eta), cutoff);
  const GaussianState g = apply_loss(squeezed_gaussian(r), LossVector::uniform(1, eta));
  Rng rng(17);
  for (int rep = 0; rep < 8; ++rep) {
    const double s = -0.8 + rng.uniform();
    const cplx a(rng.normal() * 0.5, rng.normal() * 0.5);
    CVec v(1);
    v[0] = a;
    const double oracle = spqd_from_fock_operator(lossy, OrderingVector::uniform(1, s), v);
    const double closed = spqd_gaussian(g, OrderingVector::uniform(1, s), v);
    CHECK(closed == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("heralded TMS states") {
  const auto [one, p1] = tms_heralded_state(0.3, 1, 10);
  CHECK(p1 == doctest::Approx((1.0 - 0.09) * 0.09));
  CHECK(one.matrix(1, 1).real() == doctest::Approx(1.0));

  const auto [vac, p0] = tms_heralded_state(0.0, 0, 10);
  CHECK(p0 == doctest::Approx(1.0));
  CHECK(vac.matrix(0, 0).real() == doctest::Approx(1.0));

  const auto [none, pn] = tms_heralded_state(0.0, 2, 10);
  CHECK(pn == doctest::Approx(0.0));

  // herald probabilities from the reduced TMS density
  const FockOperator tms = tms_density(0.3, 12);
  CHECK(trace_of(tms) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("exact kernel on known pairs") {
  const int cutoff = 30;
  const FockOperator one = fock_density({InputStateSpec::fock(1)}, cutoff);
  const FockOperator two = fock_density({InputStateSpec::fock(2)}, cutoff);
  CHECK(exact_kernel(one, one) == doctest::Approx(1.0));
  CHECK(exact_kernel(one, two) == doctest::Approx(0.0));

  const cplx g1(0.8, -0.3), g2(-0.2, 0.4);
  const FockOperator c1 = fock_density({InputStateSpec::coherent(g1)}, cutoff);
  const FockOperator c2 = fock_density({InputStateSpec::coherent(g2)}, cutoff);
  CHECK(exact_kernel(c1, c2) ==
        doctest::Approx(std::exp(-std::norm(g1 - g2))).epsilon(1e-8));

  CMat zero = CMat::Zero(4, 4);
  CHECK_THROWS_AS(exact_kernel(FockOperator{1, 4, zero, 0.0, false}, one), ValidationError);
}

TEST_CASE("cross-formalism kernel agreement at cutoff 40") {
  // gaussian closed form vs truncated Fock traces
  const int cutoff = 40;
  const double r1 = 0.6, r2 = 0.35;
  const FockOperator f1 = pure_state_density(squeezed_amplitudes(r1, cutoff), 1, cutoff);
  const FockOperator f2 = pure_state_density(squeezed_amplitudes(r2, cutoff), 1, cutoff);
  const FockOperator fv = fock_density({InputStateSpec::vacuum()}, cutoff);
  const cplx gam(0.7, 0.4);
  const FockOperator fc = fock_density({InputStateSpec::coherent(gam)}, cutoff);

  CVec gv(1);
  gv[0] = gam;
  const GaussianState s1 = squeezed_gaussian(r1);
  const GaussianState s2 = squeezed_gaussian(r2);
  const GaussianState vac = vacuum_state(1);
  const GaussianState coh = coherent_gaussian(gv);

  CHECK(exact_kernel(f1, f2) == doctest::Approx(exact_gaussian_kernel(s1, s2)).epsilon(1e-6));
  CHECK(exact_kernel(f1, fv) == doctest::Approx(exact_gaussian_kernel(s1, vac)).epsilon(1e-6));
  CHECK(exact_kernel(f1, fc) == doctest::Approx(exact_gaussian_kernel(s1, coh)).epsilon(1e-6));
  CHECK(exact_kernel(fc, fv) == doctest::Approx(exact_gaussian_kernel(coh, vac)).epsilon(1e-10));
}

TEST_CASE("spqd_output matches the oracle Wigner of the network output") {
  Rng rng(21);
  const int cutoff = 6;
  for (int rep = 0; rep < 3; ++rep) {
    const TransferMatrix v(haar_unitary(2, rng));
    const LonEncoding enc{
        {InputStateSpec::single_photon(0.7), InputStateSpec::single_photon(0.4)}, v};
    const FockOperator in = fock_density(enc.inputs, cutoff);
    const FockOperator out = conjugate_lon(in, v);
    for (int pt = 0; pt < 5; ++pt) {
      const double s = -0.6 + 0.8 * rng.uniform();
      CVec a(2);
      a << cplx(0.5 * rng.normal(), 0.5 * rng.normal()),
          cplx(0.5 * rng.normal(), 0.5 * rng.normal());
      const double oracle = spqd_from_fock_operator(out, OrderingVector::uniform(2, s), a);
      const double closed = spqd_output(enc, s, a);
      CHECK(closed == doctest::Approx(oracle).epsilon(1e-6));
    }
  }
}

TEST_CASE("balanced beam splitter on single photons reproduces the paper product") {
  CMat bs(2, 2);
  bs << 1.0, 1.0, 1.0, -1.0;
  bs /= std::sqrt(2.0);
  const LonEncoding enc{{InputStateSpec::single_photon(1.0), InputStateSpec::single_photon(1.0)},
                        TransferMatrix(bs)};
  CVec origin = CVec::Zero(2);
  CHECK(spqd_output(enc, 0.0, origin) == doctest::Approx(4.0 / (kPi * kPi)).epsilon(1e-12));
  // cross-check against the Fock oracle
  const FockOperator out = conjugate_lon(fock_density(enc.inputs, 6), enc.V);
  CHECK(spqd_from_fock_operator(out, OrderingVector::uniform(2, 0.0), origin) ==
        doctest::Approx(4.0 / (kPi * kPi)).epsilon(1e-10));
}

TEST_CASE("oracle values are stable under cutoff doubling") {
  Rng rng(23);
  const TransferMatrix v(haar_unitary(2, rng));
  const std::vector<InputStateSpec> inputs = {InputStateSpec::single_photon(0.5),
                                              InputStateSpec::single_photon(0.5)};
  auto kernel_at = [&](int cutoff) {
    const FockOperator a = conjugate_lon(fock_density(inputs, cutoff), v);
    const FockOperator b = conjugate_lon(fock_density(inputs, cutoff), TransferMatrix(v.V.adjoint()));
    return exact_kernel(a, b);
  };
  CHECK(kernel_at(5) == doctest::Approx(kernel_at(10)).epsilon(1e-8));
}

TEST_SUITE_END();
