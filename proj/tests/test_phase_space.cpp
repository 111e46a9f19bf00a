#include <doctest.h>

#include <cmath>

#include "qkpse/errors.hpp"
#include "qkpse/fock.hpp"
#include "qkpse/phase_space.hpp"
#include "qkpse/quadrature.hpp"
#include "qkpse/rng.hpp"
#include "qkpse/special.hpp"

using namespace qkpse;

TEST_SUITE_BEGIN("phase_space");

TEST_CASE("point operator special cases") {
  // Husimi point operator is the coherent projector over pi
  const PointOperator husimi = single_mode_point_operator(-1.0, 0.0, 8);
  CMat expected = CMat::Zero(8, 8);
  expected(0, 0) = 1.0 / kPi;
  CHECK((husimi.matrix - expected).cwiseAbs().maxCoeff() < 1e-12);

  // Wigner point operator at the origin is (2/pi) parity
  const PointOperator wigner = single_mode_point_operator(0.0, 0.0, 16);
  for (int n = 0; n < 16; ++n) {
    CHECK(wigner.matrix(n, n).real() == doctest::Approx(2.0 / kPi * (n % 2 ? -1.0 : 1.0)));
  }
  CHECK((wigner.matrix - wigner.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(single_mode_point_operator(1.0, 0.0, 8), OrderingInfeasible);
  CHECK_THROWS_AS(single_mode_point_operator(0.0, cplx(1.0 / 0.0, 0.0), 8), ValidationError);
  CHECK_THROWS_AS(single_mode_point_operator(0.0, 0.0, 1), ValidationError);
}

TEST_CASE("point operator trace converges to 1/pi for s <= 0") {
  for (double s : {-0.8, -0.3, 0.0}) {
    const cplx alpha(0.3, 0.1);
    const double t1 = single_mode_point_operator(s, alpha, 24).matrix.trace().real();
    const double t2 = single_mode_point_operator(s, alpha, 48).matrix.trace().real();
    const double target = 1.0 / kPi;
    CHECK(std::abs(t2 - target) <= std::abs(t1 - target) + 1e-12);
    CHECK(t2 == doctest::Approx(target).epsilon(s == 0.0 ? 2e-2 : 1e-6));
  }
  // s = -0.3 at cutoff 48 is essentially exact
  const double t = single_mode_point_operator(-0.3, cplx(0.3, 0.1), 48).matrix.trace().real();
  CHECK(t == doctest::Approx(1.0 / kPi).epsilon(1e-9));
}

TEST_CASE("point operator eigenvalues respect the single-mode interval for t >= 0") {
  for (double t : {0.0, 0.4, 0.9}) {
    for (cplx alpha : {cplx(0.0, 0.0), cplx(0.7, -0.4)}) {
      const PointOperator op = single_mode_point_operator(-t, alpha, 20);
      Eigen::SelfAdjointEigenSolver<CMat> es(op.matrix);
      const auto [lo, hi] = single_mode_povm_interval(t);
      CHECK(es.eigenvalues().minCoeff() >= lo - 1e-9);
      CHECK(es.eigenvalues().maxCoeff() <= hi + 1e-9);
    }
  }
}

TEST_CASE("spqd_from_fock_operator on vacuum and single photon") {
  const FockOperator vac = fock_density({InputStateSpec::vacuum()}, 12);
  CVec origin(1);
  origin[0] = 0.0;
  CHECK(spqd_from_fock_operator(vac, OrderingVector::uniform(1, 0.0), origin) ==
        doctest::Approx(2.0 / kPi).epsilon(1e-10));

  const FockOperator one = fock_density({InputStateSpec::fock(1)}, 12);
  CHECK(spqd_from_fock_operator(one, OrderingVector::uniform(1, 0.0), origin) ==
        doctest::Approx(-2.0 / kPi).epsilon(1e-10));
  CHECK(spqd_from_fock_operator(one, OrderingVector::uniform(1, -1.0), origin) ==
        doctest::Approx(0.0));
}

TEST_CASE("lossy single photon closed form") {
  // vacuum limit
  for (double s : {-0.5, 0.0, 0.4}) {
    const cplx a(0.3, -0.6);
    CHECK(spqd_lossy_single_photon(0.0, s, a) ==
          doctest::Approx(2.0 / (kPi * (1.0 - s)) * std::exp(-2.0 * std::norm(a) / (1.0 - s)))
              .epsilon(1e-12));
  }
  // eta = 1/2, s = 0: global maximum 2/(e pi) at |alpha|^2 = 1/2
  const double peak = spqd_lossy_single_photon(0.5, 0.0, std::sqrt(0.5));
  CHECK(peak == doctest::Approx(2.0 / (std::exp(1.0) * kPi)).epsilon(1e-12));
  // eta = 1, s = 0 at the origin equals the Fock value
  CHECK(spqd_lossy_single_photon(1.0, 0.0, 0.0) == doctest::Approx(-2.0 / kPi));
  CHECK_THROWS_AS(spqd_lossy_single_photon(0.5, 1.0, 0.0), OrderingInfeasible);
}

TEST_CASE("negative volume of the lossy single photon") {
  // continuity at the non-negativity boundary
  for (double eta : {0.2, 0.5, 0.9}) {
    CHECK(negvol_lossy_single_photon(eta, 1.0 - 2.0 * eta) == doctest::Approx(1.0));
  }
  CHECK(negvol_lossy_single_photon(0.5, 0.0) == doctest::Approx(1.0));
  // closed form against quadrature
  const double closed = negvol_lossy_single_photon(0.6, 0.5);
  const PqdFunction p = family_pqd(InputStateSpec::single_photon(0.6), 0.5);
  const double numeric = negvol_numeric(p, p.envelope_sigma, 1e-6);
  CHECK(numeric == doctest::Approx(closed).epsilon(1e-4));
}

TEST_CASE("extrema of the lossy single photon") {
  const SinglePhotonExtrema e = extrema_lossy_single_photon(0.5, 0.0);
  CHECK(e.has_ring);
  CHECK(e.ring_radius_sq == doctest::Approx(0.5));
  CHECK(e.at_ring == doctest::Approx(2.0 / (std::exp(1.0) * kPi)).epsilon(1e-12));
  CHECK(e.at_origin == doctest::Approx(0.0));

  const SinglePhotonExtrema vac = extrema_lossy_single_photon(0.0, 0.0);
  CHECK_FALSE(vac.has_ring);
  CHECK(vac.at_origin == doctest::Approx(2.0 / kPi));

  // the stated ring value is the stationary value of the closed form
  const SinglePhotonExtrema g = extrema_lossy_single_photon(0.85, 0.3);
  const double direct = spqd_lossy_single_photon(0.85, -0.3, std::sqrt(g.ring_radius_sq));
  CHECK(g.at_ring == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("cat state closed form") {
  // gamma = 0 degenerates to the vacuum Gaussian
  for (double s : {-0.4, 0.2}) {
    const cplx a(0.4, 0.3);
    CHECK(spqd_lossy_cat(0.0, 0.7, s, a) ==
          doctest::Approx(2.0 / (kPi * (1.0 - s)) * std::exp(-2.0 * std::norm(a) / (1.0 - s)))
              .epsilon(1e-12));
  }
  // pure cat at the origin has Wigner 2/pi (even photon content)
  CHECK(spqd_lossy_cat(1.0, 1.0, 0.0, 0.0) == doctest::Approx(2.0 / kPi).epsilon(1e-12));
  // against the Fock oracle at cutoff 20
  const FockOperator cat = fock_density({InputStateSpec::cat(1.0)}, 20);
  CVec origin(1);
  origin[0] = 0.0;
  CHECK(spqd_from_fock_operator(cat, OrderingVector::uniform(1, 0.0), origin) ==
        doctest::Approx(spqd_lossy_cat(1.0, 1.0, 0.0, 0.0)).epsilon(1e-8));
}

TEST_CASE("gaussian PQD values and ordering guard") {
  CVec origin(1);
  origin[0] = 0.0;
  CHECK(spqd_gaussian(vacuum_state(1), OrderingVector::uniform(1, 0.0), origin) ==
        doctest::Approx(2.0 / kPi).epsilon(1e-12));

  CVec gamma(1);
  gamma[0] = cplx(0.7, -0.2);
  CHECK(spqd_gaussian(coherent_gaussian(gamma), OrderingVector::uniform(1, -1.0), gamma) ==
        doctest::Approx(1.0 / kPi).epsilon(1e-12));

  const GaussianState sq = squeezed_gaussian(0.5);
  const double smax = std::exp(-1.0);
  CHECK(spqd_gaussian(sq, OrderingVector::uniform(1, smax - 1e-3), origin) > 0.0);
  CHECK_THROWS_AS(spqd_gaussian(sq, OrderingVector::uniform(1, smax + 1e-3), origin),
                  PositiveDefiniteViolation);
}

TEST_CASE("negvol_numeric basics and monotonicity in s") {
  const PqdFunction vac = family_pqd(InputStateSpec::vacuum(), 0.0);
  CHECK(negvol_numeric(vac, vac.envelope_sigma, 1e-6) == doctest::Approx(1.0).epsilon(1e-6));

  double prev = 0.0;
  for (double s : {0.0, 0.2, 0.4}) {
    const PqdFunction cat = family_pqd(InputStateSpec::cat(2.0), s);
    const double n = negvol_numeric(cat, cat.envelope_sigma, 1e-6);
    CHECK(n >= std::max(1.0 - 1e-6, prev - 1e-6));
    prev = n;
  }
  CHECK(prev > 1.0 + 1e-3);
}

TEST_CASE("povm range bound") {
  for (int m = 1; m <= 8; ++m) {
    CHECK(povm_range_bound(OrderingVector::uniform(m, 0.0)) ==
          doctest::Approx(std::pow(2.0, m + 1)));
    CHECK(povm_range_bound(OrderingVector::uniform(m, 1.0)) == doctest::Approx(1.0));
  }
  CHECK(povm_range_bound(OrderingVector::uniform(1, 0.5)) == doctest::Approx(16.0 / 9.0));
  CHECK_THROWS_AS(povm_range_bound(OrderingVector::uniform(1, -0.1)), OrderingInfeasible);
}

TEST_CASE("family normalization by quadrature") {
  const std::vector<std::pair<InputStateSpec, double>> cases = {
      {InputStateSpec::vacuum(), 0.0},
      {InputStateSpec::single_photon(0.5), 0.0},
      {InputStateSpec::single_photon(0.8), 0.35},
      {InputStateSpec::coherent(cplx(0.8, -0.5), 0.7), -0.2},
      {InputStateSpec::thermal(0.7, 0.9), 0.1},
      {InputStateSpec::cat(cplx(1.4, 0.3), 0.75), 0.1},
  };
  for (const auto& [spec, s] : cases) {
    const PqdFunction p = family_pqd(spec, s);
    PolarQuadratureOptions opts;
    opts.radius = 6.0 * p.envelope_sigma;
    opts.rel_tol = 1e-7;
    const double total = integrate_polar(
        [&p](cplx a) {
          CVec v(1);
          v[0] = a;
          return p.eval(v);
        },
        opts);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("single photon sign threshold on a grid") {
  Rng rng(2024);
  for (int rep = 0; rep < 20; ++rep) {
    const double eta = 0.05 + 0.9 * rng.uniform();
    const double s = -0.95 + 1.85 * rng.uniform();
    double min_val = 1e300;
    for (int i = 0; i < 100; ++i) {
      for (int j = 0; j < 100; ++j) {
        const cplx a(-3.0 + 6.0 * i / 99.0, -3.0 + 6.0 * j / 99.0);
        min_val = std::min(min_val, spqd_lossy_single_photon(eta, s, a));
      }
    }
    if (s <= 1.0 - 2.0 * eta) {
      CHECK(min_val >= -1e-12);
    } else {
      CHECK(min_val < 0.0);
    }
  }
}

TEST_CASE("gaussian PQDs connect by convolution across orderings") {
  const GaussianState g = squeezed_gaussian(0.4);
  const double s = -0.6, sp = 0.1;
  const double d = sp - s;
  for (cplx a : {cplx(0.0, 0.0), cplx(0.5, -0.3), cplx(-0.2, 0.8)}) {
    PolarQuadratureOptions opts;
    opts.radius = 8.0;
    opts.center = a;
    opts.rel_tol = 1e-7;
    const double convolved = integrate_polar(
        [&](cplx b) {
          CVec v(1);
          v[0] = b;
          return spqd_gaussian(g, OrderingVector::uniform(1, sp), v) * 2.0 / (kPi * d) *
                 std::exp(-2.0 * std::norm(a - b) / d);
        },
        opts);
    CVec v(1);
    v[0] = a;
    const double direct = spqd_gaussian(g, OrderingVector::uniform(1, s), v);
    CHECK(convolved == doctest::Approx(direct).epsilon(1e-3));
  }
}

TEST_CASE("closed-form families agree with the Fock oracle at random points") {
  Rng rng(7);
  const int cutoff = 30;
  const std::vector<InputStateSpec> specs = {
      InputStateSpec::single_photon(0.65),
      InputStateSpec::cat(cplx(1.2, -0.4), 0.8),
      InputStateSpec::coherent(cplx(0.9, 0.5), 0.6),
      InputStateSpec::thermal(0.8, 0.75),
  };
  for (const auto& spec : specs) {
    const FockOperator rho = fock_density({spec}, cutoff);
    for (int rep = 0; rep < 13; ++rep) {
      const double s = -0.9 + 1.2 * rng.uniform();  // orderings in [-0.9, 0.3]
      const cplx a(1.5 * (2.0 * rng.uniform() - 1.0), 1.5 * (2.0 * rng.uniform() - 1.0));
      CVec v(1);
      v[0] = a;
      const double oracle = spqd_from_fock_operator(rho, OrderingVector::uniform(1, s), v);
      const double closed = family_pqd(spec, s).eval(v);
      CHECK(closed == doctest::Approx(oracle).epsilon(1e-6));
    }
  }
}

TEST_CASE("gaussian states agree with the Fock oracle") {
  Rng rng(8);
  // squeezed vacuum via its Fock amplitudes
  const double r = 0.5;
  const FockOperator sq_fock =
      pure_state_density(squeezed_amplitudes(r, 30), 1, 30);
  const GaussianState sq = squeezed_gaussian(r);
  for (int rep = 0; rep < 12; ++rep) {
    const double s = -0.9 + 1.0 * rng.uniform();
    const cplx a(1.2 * (2.0 * rng.uniform() - 1.0), 1.2 * (2.0 * rng.uniform() - 1.0));
    CVec v(1);
    v[0] = a;
    if (s >= std::exp(-2.0 * r)) continue;
    const double oracle = spqd_from_fock_operator(sq_fock, OrderingVector::uniform(1, s), v);
    const double closed = spqd_gaussian(sq, OrderingVector::uniform(1, s), v);
    CHECK(closed == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("loss transform identity for gaussian PQDs") {
  Rng rng(9);
  for (int rep = 0; rep < 10; ++rep) {
    const GaussianState g = random_gaussian(2, rng, 0.5);
    Vec etav(2);
    etav << 0.55 + 0.4 * rng.uniform(), 0.55 + 0.4 * rng.uniform();
    const LossVector eta(etav);
    const GaussianState lossy = apply_loss(g, eta);
    Vec sv(2);
    sv << -0.4 + 0.5 * rng.uniform(), -0.4 + 0.5 * rng.uniform();
    CVec a(2);
    a << cplx(rng.normal() * 0.4, rng.normal() * 0.4), cplx(rng.normal() * 0.4, rng.normal() * 0.4);
    // 1/det(eta) W^{(t)}(alpha eta^{-1/2}) with t = (s - 1 + eta)/eta per mode
    Vec tv(2);
    CVec scaled(2);
    double det = 1.0;
    for (int j = 0; j < 2; ++j) {
      tv[j] = (sv[j] - 1.0 + etav[j]) / etav[j];
      scaled[j] = a[j] / std::sqrt(etav[j]);
      det *= etav[j];
    }
    const double lhs = spqd_gaussian(lossy, OrderingVector(sv), a);
    const double rhs = spqd_gaussian(g, OrderingVector(tv), scaled) / det;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("fock state PQD closed form matches the point operator") {
  for (int n : {0, 1, 3}) {
    for (double s : {-0.99, -0.5, 0.0, 0.3}) {
      for (cplx a : {cplx(0.0, 0.0), cplx(0.6, -0.8)}) {
        const PointOperator op = single_mode_point_operator(s, a, 12);
        const double via_op = op.matrix(n, n).real();
        CHECK(spqd_fock_state(n, s, a) == doctest::Approx(via_op).epsilon(1e-9));
      }
    }
  }
}

TEST_SUITE_END();
