#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "syncfree/common.hpp"

namespace syncfree {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline bool complex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

inline void sort_spectrum(std::vector<Complex>& v) { std::sort(v.begin(), v.end(), complex_less); }

inline std::vector<Complex> spectrum(const MatrixXd& a) {
  if (a.rows() == 0) return {};
  Eigen::EigenSolver<MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) throw EigensolverFailure("real eigensolver did not converge");
  std::vector<Complex> v(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  sort_spectrum(v);
  return v;
}

inline std::vector<Complex> spectrum(const MatrixXcd& a) {
  if (a.rows() == 0) return {};
  Eigen::ComplexEigenSolver<MatrixXcd> es(a, false);
  if (es.info() != Eigen::Success) throw EigensolverFailure("complex eigensolver did not converge");
  std::vector<Complex> v(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  sort_spectrum(v);
  return v;
}

inline double spectral_abscissa_of(const std::vector<Complex>& eigs) {
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& z : eigs) r = std::max(r, z.real());
  return r;
}

inline double spectral_radius_of(const std::vector<Complex>& eigs) {
  double r = 0.0;
  for (const auto& z : eigs) r = std::max(r, std::abs(z));
  return r;
}

template <typename Derived>
std::vector<Complex> spectrum(const Eigen::MatrixBase<Derived>& a) {
  if constexpr (std::is_same_v<typename Derived::Scalar, double>)
    return spectrum(MatrixXd(a));
  else
    return spectrum(MatrixXcd(a));
}

template <typename Derived>
double spectral_abscissa(const Eigen::MatrixBase<Derived>& a) {
  return spectral_abscissa_of(spectrum(a));
}

template <typename Derived>
double spectral_radius(const Eigen::MatrixBase<Derived>& a) {
  return spectral_radius_of(spectrum(a));
}

// Stability margin of a closed-loop matrix: distance of the spectrum from
// the boundary of the stable region (negative when unstable).
template <typename Derived>
double stability_margin(const Eigen::MatrixBase<Derived>& a, TimeDomain domain) {
  return domain == TimeDomain::continuous ? -spectral_abscissa(a) : 1.0 - spectral_radius(a);
}

template <typename M>
int rank_svd(const M& a, double rel_tol = kRankRelTol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a.template cast<Complex>());
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

template <typename M>
double smallest_singular_value(const M& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a.template cast<Complex>());
  const auto& sv = svd.singularValues();
  return sv.size() ? sv(sv.size() - 1) : 0.0;
}

template <typename M>
double condition_number(const M& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a.template cast<Complex>());
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0.0;
  double smin = sv(sv.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

inline MatrixXd symmetrize(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

inline double min_sym_eig(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_sym_eig(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline double operator_norm(const MatrixXd& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(a);
  return svd.singularValues()(0);
}

namespace detail {

// vec(M X N) = (N^T (x) M) vec(X); plain transpose also for complex N.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& b) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> k(a.rows() * b.rows(),
                                                          a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

}  // namespace detail

// Solve A^H X + X A = W (continuous Lyapunov/Sylvester form) by direct
// solution of the vectorized system. Sizes here are tiny (n <= ~12).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> solve_lyapunov_ct(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& w) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const int n = static_cast<int>(a.rows());
  Mat eye = Mat::Identity(n, n);
  Mat ah = a.adjoint();
  Mat at = a.transpose();
  Mat sys = detail::kron<Scalar>(eye, ah) + detail::kron<Scalar>(at, eye);
  Vec rhs = Eigen::Map<const Vec>(w.data(), n * n);
  Vec x = sys.fullPivLu().solve(rhs);
  return Eigen::Map<const Mat>(x.data(), n, n);
}

// Solve A^H X A - X = W (discrete Lyapunov form).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> solve_lyapunov_dt(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& w) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const int n = static_cast<int>(a.rows());
  Mat eye = Mat::Identity(n, n);
  Mat sys = detail::kron<Scalar>(a.transpose(), a.adjoint()) - detail::kron<Scalar>(eye, eye);
  Vec rhs = Eigen::Map<const Vec>(w.data(), n * n);
  Vec x = sys.fullPivLu().solve(rhs);
  return Eigen::Map<const Mat>(x.data(), n, n);
}

// Stabilizing solution S of the filter Riccati equation
//   A S + S A^T - S C^T C S + I = 0
// via the stable eigenvectors of the Hamiltonian [[A^T, -C^T C], [-I, -A]].
inline MatrixXd care_filter(const MatrixXd& a, const MatrixXd& c) {
  const int n = static_cast<int>(a.rows());
  MatrixXd ham(2 * n, 2 * n);
  ham.topLeftCorner(n, n) = a.transpose();
  ham.topRightCorner(n, n) = -c.transpose() * c;
  ham.bottomLeftCorner(n, n) = -MatrixXd::Identity(n, n);
  ham.bottomRightCorner(n, n) = -a;
  Eigen::EigenSolver<MatrixXd> es(ham, true);
  if (es.info() != Eigen::Success) throw RiccatiFailure("Hamiltonian eigensolve did not converge");
  std::vector<int> stable;
  for (int i = 0; i < 2 * n; ++i)
    if (es.eigenvalues()(i).real() < 0) stable.push_back(i);
  if (static_cast<int>(stable.size()) != n)
    throw RiccatiFailure("stable Hamiltonian eigenspace has dimension " +
                         std::to_string(stable.size()) + ", expected " + std::to_string(n));
  MatrixXcd v1(n, n), v2(n, n);
  for (int k = 0; k < n; ++k) {
    v1.col(k) = es.eigenvectors().col(stable[k]).head(n);
    v2.col(k) = es.eigenvectors().col(stable[k]).tail(n);
  }
  Eigen::FullPivLU<MatrixXcd> lu(v1);
  if (!lu.isInvertible()) throw RiccatiFailure("stable eigenbasis is singular");
  MatrixXd s = symmetrize((v2 * lu.inverse()).real());
  double resid = (a * s + s * a.transpose() - s * c.transpose() * c * s +
                  MatrixXd::Identity(n, n))
                     .norm();
  if (!(resid <= 1e-6 * std::max(1.0, s.squaredNorm())))
    throw RiccatiFailure("residual " + std::to_string(resid));
  return s;
}

// Stabilizing solution S of the discrete filter Riccati equation
//   S = A S A^T - A S C^T (I + C S C^T)^{-1} C S A^T + I
// via the stable deflating subspace of the symplectic pencil
//   [[A^T, 0], [-I, I]] - z [[I, C^T C], [0, A]].
inline MatrixXd dare_filter(const MatrixXd& a, const MatrixXd& c) {
  const int n = static_cast<int>(a.rows());
  MatrixXd l(2 * n, 2 * n), m(2 * n, 2 * n);
  l.setZero();
  m.setZero();
  l.topLeftCorner(n, n) = a.transpose();
  l.bottomLeftCorner(n, n) = -MatrixXd::Identity(n, n);
  l.bottomRightCorner(n, n) = MatrixXd::Identity(n, n);
  m.topLeftCorner(n, n) = MatrixXd::Identity(n, n);
  m.topRightCorner(n, n) = c.transpose() * c;
  m.bottomRightCorner(n, n) = a;
  Eigen::GeneralizedEigenSolver<MatrixXd> ges(l, m, true);
  if (ges.info() != Eigen::Success) throw RiccatiFailure("symplectic pencil QZ did not converge");
  const double scale = l.norm() + m.norm();
  std::vector<int> stable;
  for (int i = 0; i < 2 * n; ++i) {
    Complex alpha = ges.alphas()(i);
    double beta = ges.betas()(i);
    if (std::abs(beta) <= 1e-14 * scale) continue;  // eigenvalue at infinity
    if (std::abs(alpha / beta) < 1.0) stable.push_back(i);
  }
  if (static_cast<int>(stable.size()) != n)
    throw RiccatiFailure("stable deflating subspace has dimension " +
                         std::to_string(stable.size()) + ", expected " + std::to_string(n));
  MatrixXcd v1(n, n), v2(n, n);
  for (int k = 0; k < n; ++k) {
    v1.col(k) = ges.eigenvectors().col(stable[k]).head(n);
    v2.col(k) = ges.eigenvectors().col(stable[k]).tail(n);
  }
  Eigen::FullPivLU<MatrixXcd> lu(v1);
  if (!lu.isInvertible()) throw RiccatiFailure("stable deflating basis is singular");
  MatrixXd s = symmetrize((v2 * lu.inverse()).real());
  MatrixXd ip = MatrixXd::Identity(c.rows(), c.rows()) + c * s * c.transpose();
  MatrixXd resid_m = a * s * a.transpose() -
                     a * s * c.transpose() * ip.llt().solve(c * s * a.transpose()) +
                     MatrixXd::Identity(n, n) - s;
  double resid = resid_m.norm();
  if (!(resid <= 1e-6 * std::max(1.0, s.squaredNorm())))
    throw RiccatiFailure("residual " + std::to_string(resid));
  return s;
}

// Monic characteristic polynomial coefficients (descending powers, c[0] = 1)
// by the Faddeev-LeVerrier recursion.
template <typename Scalar>
std::vector<Scalar> charpoly(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(a.rows());
  std::vector<Scalar> c(n + 1);
  c[0] = Scalar(1);
  Mat nk = Mat::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    Mat mk = a * nk;
    c[k] = -mk.trace() / Scalar(k);
    nk = mk + c[k] * Mat::Identity(n, n);
  }
  return c;
}

// Numerator matrix coefficients of C (sI - A)^{-1} B (descending powers,
// degree n-1): N_k from the same Faddeev-LeVerrier recursion, so that
// numerator(s) = sum_k s^{n-1-k} C N_k B and denominator = charpoly(A).
inline std::vector<MatrixXd> transfer_numerator(const MatrixXd& a, const MatrixXd& b,
                                                const MatrixXd& c) {
  const int n = static_cast<int>(a.rows());
  std::vector<MatrixXd> num;
  num.reserve(n);
  MatrixXd nk = MatrixXd::Identity(n, n);
  double ck;
  for (int k = 1; k <= n; ++k) {
    num.push_back(c * nk * b);
    MatrixXd mk = a * nk;
    ck = -mk.trace() / k;
    nk = mk + ck * MatrixXd::Identity(n, n);
  }
  return num;
}

// Roots of a polynomial given by (complex) coefficients in descending powers,
// via the companion matrix. Leading coefficients that are negligible relative
// to the largest one are trimmed first.
inline std::vector<Complex> poly_roots(std::vector<Complex> coeffs, double trim_rel = 1e-10) {
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return {};
  size_t first = 0;
  while (first + 1 < coeffs.size() && std::abs(coeffs[first]) <= trim_rel * scale) ++first;
  coeffs.erase(coeffs.begin(), coeffs.begin() + first);
  const int deg = static_cast<int>(coeffs.size()) - 1;
  if (deg <= 0) return {};
  MatrixXcd comp = MatrixXcd::Zero(deg, deg);
  for (int i = 0; i < deg; ++i) comp(0, i) = -coeffs[i + 1] / coeffs[0];
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  return spectrum(comp);
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

inline std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v = linspace(std::log10(lo), std::log10(hi), n);
  for (auto& x : v) x = std::pow(10.0, x);
  return v;
}

}  // namespace syncfree
