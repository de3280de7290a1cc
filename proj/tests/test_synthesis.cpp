#include <catch2/catch_amalgamated.hpp>

#include "syncfree/harness.hpp"
#include "test_util.hpp"

using namespace syncfree;
using Catch::Approx;

namespace {

void check_certificate(const LTIPlant& pl, const SynthesisCertificate& cert) {
  CHECK(min_sym_eig(cert.P) > 0.0);
  CHECK(min_sym_eig(cert.Q) > 0.0);
  CHECK(cert.residual_neutral <= 1e-8);
  CHECK(cert.residual_lyap <= 1e-8);
  CHECK(cert.margin_boun >= 0.0);
  CHECK(cert.margin_small > 0.0);
  CHECK(cert.epsilon > 0.0);
  CHECK(cert.delta > 0.0);
}

}  // namespace

TEST_CASE("neutral Lyapunov matrix for a skew-symmetric state matrix") {
  MatrixXd a{{0.0, 1.0}, {-1.0, 0.0}};
  MatrixXd p = neutral_lyapunov(a, TimeDomain::continuous);
  CHECK((a.transpose() * p + p * a).norm() < 1e-10);
  CHECK(min_sym_eig(p) > 0.0);
}

TEST_CASE("neutral Lyapunov matrix for diag(-1, 0)") {
  MatrixXd a = MatrixXd::Zero(2, 2);
  a(0, 0) = -1.0;
  MatrixXd p = neutral_lyapunov(a, TimeDomain::continuous);
  CHECK(p(0, 0) == Approx(0.5).margin(1e-10));
  CHECK(p(1, 1) == Approx(1.0).margin(1e-10));
  CHECK(std::abs(p(0, 1)) < 1e-10);
  CHECK(max_sym_eig(a.transpose() * p + p * a) <= 1e-12);
}

TEST_CASE("neutral Lyapunov matrix for a discrete rotation") {
  double th = 0.9;
  MatrixXd a{{std::cos(th), -std::sin(th)}, {std::sin(th), std::cos(th)}};
  MatrixXd p = neutral_lyapunov(a, TimeDomain::discrete);
  CHECK((a.transpose() * p * a - p).norm() < 1e-10);
  CHECK(min_sym_eig(p) > 0.0);
}

TEST_CASE("neutral Lyapunov handles a defective strictly stable block") {
  // boundary pair (+-i) plus a stable Jordan block at -1
  MatrixXd a = MatrixXd::Zero(4, 4);
  a(0, 1) = 1.0;
  a(1, 0) = -1.0;
  a(2, 2) = a(3, 3) = -1.0;
  a(2, 3) = 1.0;
  MatrixXd p = neutral_lyapunov(a, TimeDomain::continuous);
  CHECK(min_sym_eig(p) > 0.0);
  CHECK(max_sym_eig(a.transpose() * p + p * a) <= 1e-8);
}

TEST_CASE("neutral Lyapunov rejects non-neutrally-stable input") {
  MatrixXd jordan{{0.0, 1.0}, {0.0, 0.0}};
  CHECK_THROWS_AS(neutral_lyapunov(jordan, TimeDomain::continuous), NotNeutrallyStable);
}

TEST_CASE("observer design") {
  MatrixXd a{{0.0, 1.0}, {0.0, 0.0}};
  MatrixXd c{{1.0, 0.0}};
  MatrixXd h = design_observer(a, c, TimeDomain::continuous);
  CHECK(spectral_abscissa(a + h * c) <= -1e-3);

  MatrixXd stable{{-2.0, 0.0}, {0.0, -1.0}};
  CHECK(design_observer(stable, c, TimeDomain::continuous).norm() == 0.0);

  MatrixXd ho{{0.0, 1.0}, {-1.0, 0.0}};
  MatrixXd h2 = design_observer(ho, c, TimeDomain::continuous);
  CHECK(spectral_abscissa(ho + h2 * c) <= -1e-3);

  MatrixXd rot{{std::cos(0.7), -std::sin(0.7)}, {std::sin(0.7), std::cos(0.7)}};
  MatrixXd h3 = design_observer(rot, c, TimeDomain::discrete);
  CHECK(spectral_radius(rot + h3 * c) <= 1.0 - 1e-3);

  MatrixXd undet_a{{1.0}};
  MatrixXd undet_c{{0.0}};
  CHECK_THROWS_AS(design_observer(undet_a, undet_c, TimeDomain::continuous), NotDetectable);
}

TEST_CASE("epsilon and Q from the shifted Lyapunov solve") {
  auto [eps, q] = epsilon_and_Q(-MatrixXd::Identity(2, 2));
  CHECK(eps == Approx(1.0));
  CHECK((q - MatrixXd::Identity(2, 2)).norm() < 1e-12);

  MatrixXd scalar{{-2.0}};
  auto [eps2, q2] = epsilon_and_Q(scalar);
  CHECK(eps2 == Approx(2.0));
  CHECK(q2(0, 0) == Approx(0.5));

  // residual of the assembled identity for a generic Hurwitz matrix
  MatrixXd ahc{{-1.0, 2.0}, {0.0, -3.0}};
  auto [eps3, q3] = epsilon_and_Q(ahc);
  MatrixXd resid = ahc.transpose() * q3 + q3 * ahc + eps3 * q3 + MatrixXd::Identity(2, 2);
  CHECK(operator_norm(resid) <= 1e-8);

  CHECK_THROWS_AS(epsilon_and_Q(MatrixXd{{1.0}}), NotHurwitz);
}

TEST_CASE("delta selection") {
  MatrixXd eye = MatrixXd::Identity(2, 2);
  CHECK(choose_delta(eye, eye, MatrixXd::Zero(2, 1), 1.0) == Approx(1.0));

  MatrixXd one{{1.0}};
  CHECK(choose_delta(one, one, one, 1.0) == Approx(1.0 / 32.0));

  MatrixXd huge = 1e40 * MatrixXd::Identity(1, 1);
  CHECK_THROWS_AS(choose_delta(huge, huge, one, 1.0), DeltaUnderflow);
}

TEST_CASE("continuous design for the harmonic oscillator") {
  LTIPlant pl = harmonic_oscillator_plant();
  auto [pr, cert] = synthesize_ct_with_bounds(pl);
  check_certificate(pl, cert);
  CHECK(pr.scaling == Scaling::local_bounds);
  CHECK(pr.Dc.norm() == 0.0);
  CHECK((pr.Ac - (pl.A + cert.H * pl.C)).norm() < 1e-14);
  CHECK((pr.Bc + cert.H).norm() < 1e-14);
  CHECK((pr.Fc + cert.delta * pl.B.transpose() * cert.P).norm() < 1e-14);
  CHECK(cert.delta == Approx(1.0 / 64.0));
  CHECK(grid_verify(pl, pr, Variant::P5).pass);
}

TEST_CASE("asymptotically stable plants get the zero protocol") {
  LTIPlant pl{MatrixXd{{-1.0, 0.5}, {0.0, -0.5}}, MatrixXd{{0.0}, {1.0}}, MatrixXd{{1.0, 0.0}},
              TimeDomain::continuous};
  auto [pr, cert] = synthesize_ct_with_bounds(pl);
  CHECK(pr.nc() == 0);
  CHECK(pr.Dc.norm() == 0.0);
  check_certificate(pl, cert);
}

TEST_CASE("conditions are named when synthesis is refused") {
  LTIPlant dbl{MatrixXd{{0.0, 1.0}, {0.0, 0.0}}, MatrixXd{{0.0}, {1.0}}, MatrixXd{{1.0, 0.0}},
               TimeDomain::continuous};
  try {
    synthesize_ct_with_bounds(dbl);
    FAIL("expected ConditionsNotMet");
  } catch (const ConditionsNotMet& e) {
    CHECK(e.condition_name == "neutrally stable");
  }
  LTIPlant wrong_domain = harmonic_oscillator_plant();
  wrong_domain.domain = TimeDomain::discrete;
  CHECK_THROWS_AS(synthesize_ct_with_bounds(wrong_domain), ConditionsNotMet);
}

TEST_CASE("discrete design for a rotation agent") {
  LTIPlant pl = rotation_agent_dt(0.7);
  auto [pr, cert] = synthesize_dt_with_bounds(pl);
  check_certificate(pl, cert);
  REQUIRE(cert.grid_margin.has_value());
  CHECK(*cert.grid_margin > 1e-6);
  GridReport rep = grid_verify(pl, pr, Variant::P5);
  CHECK(rep.pass);
  for (const auto& s : rep.samples) CHECK(s.margin > 0.0);  // strict Schur at every sample

  LTIPlant jordan{MatrixXd{{1.0, 1.0}, {0.0, 1.0}}, MatrixXd{{0.0}, {1.0}}, MatrixXd{{1.0, 0.0}},
                  TimeDomain::discrete};
  CHECK_THROWS_AS(synthesize_dt_with_bounds(jordan), ConditionsNotMet);
}

TEST_CASE("input scaling robustness") {
  LTIPlant base = harmonic_oscillator_plant();
  for (double beta : {0.1, 10.0}) {
    LTIPlant pl = base;
    pl.B *= beta;
    auto [pr, cert] = synthesize_ct_with_bounds(pl);
    check_certificate(pl, cert);
  }
}

TEST_CASE("certificate inequalities hold over random neutrally stable plants") {
  Rng rng(1618);
  for (int trial = 0; trial < 10; ++trial) {
    LTIPlant pl = testgen::random_neutrally_stable_plant(rng, 6, TimeDomain::continuous);
    auto [pr, cert] = synthesize_ct_with_bounds(pl);
    check_certificate(pl, cert);
  }
}
