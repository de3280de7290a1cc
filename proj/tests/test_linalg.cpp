#include <catch2/catch_amalgamated.hpp>

#include "syncfree/linalg.hpp"

using namespace syncfree;
using Catch::Approx;

TEST_CASE("spectrum sorts by real then imaginary part") {
  MatrixXd a{{0.0, 1.0}, {-1.0, 0.0}};
  auto eigs = spectrum(a);
  REQUIRE(eigs.size() == 2);
  CHECK(eigs[0].imag() == Approx(-1.0));
  CHECK(eigs[1].imag() == Approx(1.0));
  CHECK(std::abs(eigs[0].real()) < 1e-12);
}

TEST_CASE("rank via singular values") {
  MatrixXd a{{1.0, 2.0}, {2.0, 4.0}};
  CHECK(rank_svd(a) == 1);
  CHECK(rank_svd(MatrixXd::Identity(3, 3)) == 3);
  CHECK(rank_svd(MatrixXd::Zero(2, 2)) == 0);
}

TEST_CASE("continuous Lyapunov solve") {
  MatrixXd a{{-1.0, 0.5}, {0.0, -2.0}};
  MatrixXd w = -MatrixXd::Identity(2, 2);
  MatrixXd x = solve_lyapunov_ct<double>(a, w);
  CHECK((a.transpose() * x + x * a - w).norm() < 1e-12);
  CHECK(min_sym_eig(symmetrize(x)) > 0.0);
}

TEST_CASE("discrete Lyapunov solve") {
  MatrixXd a{{0.5, 0.2}, {-0.1, 0.3}};
  MatrixXd w = -MatrixXd::Identity(2, 2);
  MatrixXd x = solve_lyapunov_dt<double>(a, w);
  CHECK((a.transpose() * x * a - x - w).norm() < 1e-12);
  CHECK(min_sym_eig(symmetrize(x)) > 0.0);
}

TEST_CASE("complex Lyapunov solve") {
  MatrixXcd a{{Complex(-1.0, 0.3), Complex(0.0, 0.0)}, {Complex(0.5, 0.0), Complex(-0.5, -0.2)}};
  MatrixXcd w = -MatrixXcd::Identity(2, 2);
  MatrixXcd x = solve_lyapunov_ct<Complex>(a, w);
  CHECK((a.adjoint() * x + x * a - w).norm() < 1e-12);
}

TEST_CASE("filter Riccati (continuous) stabilizes the observer pair") {
  MatrixXd a{{0.0, 1.0}, {0.0, 0.0}};
  MatrixXd c{{1.0, 0.0}};
  MatrixXd s = care_filter(a, c);
  CHECK((a * s + s * a.transpose() - s * c.transpose() * c * s + MatrixXd::Identity(2, 2)).norm() <
        1e-8);
  MatrixXd h = -s * c.transpose();
  CHECK(spectral_abscissa(a + h * c) < 0.0);
}

TEST_CASE("filter Riccati (discrete) stabilizes the observer pair") {
  MatrixXd a{{std::cos(0.7), -std::sin(0.7)}, {std::sin(0.7), std::cos(0.7)}};
  MatrixXd c{{1.0, 0.0}};
  MatrixXd s = dare_filter(a, c);
  MatrixXd ip = MatrixXd::Identity(1, 1) + c * s * c.transpose();
  MatrixXd h = -(a * s * c.transpose()) * ip.inverse();
  CHECK(spectral_radius(a + h * c) < 1.0);
}

TEST_CASE("characteristic polynomial matches a known case") {
  // (s-1)(s-2)(s-3) = s^3 - 6 s^2 + 11 s - 6
  MatrixXd a = MatrixXd::Zero(3, 3);
  a.diagonal() << 1.0, 2.0, 3.0;
  auto c = charpoly<double>(a);
  REQUIRE(c.size() == 4);
  CHECK(c[0] == Approx(1.0));
  CHECK(c[1] == Approx(-6.0));
  CHECK(c[2] == Approx(11.0));
  CHECK(c[3] == Approx(-6.0));
}

TEST_CASE("polynomial roots via companion matrix") {
  // s^2 + 3s + 2 -> roots -1, -2
  auto roots = poly_roots({Complex(1.0), Complex(3.0), Complex(2.0)});
  REQUIRE(roots.size() == 2);
  CHECK(std::abs(roots[0] - Complex(-2.0)) < 1e-10);
  CHECK(std::abs(roots[1] - Complex(-1.0)) < 1e-10);
}

TEST_CASE("poly_roots trims negligible leading coefficients") {
  auto roots = poly_roots({Complex(1e-18), Complex(1.0), Complex(2.0)});
  REQUIRE(roots.size() == 1);
  CHECK(std::abs(roots[0] - Complex(-2.0)) < 1e-10);
}

TEST_CASE("transfer numerator by Faddeev-LeVerrier") {
  // double integrator with C=(1,0), B=(0;1): G = 1/s^2, numerator (0*s + 1)
  MatrixXd a{{0.0, 1.0}, {0.0, 0.0}};
  MatrixXd b{{0.0}, {1.0}};
  MatrixXd c{{1.0, 0.0}};
  auto num = transfer_numerator(a, b, c);
  REQUIRE(num.size() == 2);
  CHECK(num[0](0, 0) == Approx(0.0).margin(1e-14));
  CHECK(num[1](0, 0) == Approx(1.0));
}
