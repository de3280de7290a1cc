#pragma once

#include "syncfree/closedloop.hpp"

namespace syncfree {

// Certificate of the constructive design: the matrices and scalars of the
// construction together with the residuals/margins of every inequality it
// rests on. All invariants are re-checked by the test suites.
struct SynthesisCertificate {
  MatrixXd P, Q, H;
  double epsilon = 0.0;
  double delta = 0.0;
  double residual_neutral = 0.0;  // max eig of A'P+PA (ct) or A'PA-P (dt)
  double residual_lyap = 0.0;     // ||(A+HC)'Q + Q(A+HC) + eps Q + I|| (dt analog likewise)
  double margin_boun = 0.0;       // min eig of eps Q - 2 delta (QBB'P + PBB'Q)
  double margin_small = 0.0;      // min eig of I - 8 delta (PBB'P + QBB'Q)
  std::optional<double> grid_margin;  // discrete designs: normalized unit-disc grid margin
};

// P > 0 with A'P + PA <= 0 (continuous) or A'PA - P <= 0 (discrete) for a
// neutrally stable A. The boundary part is handled in the basis of its
// eigenvectors (semi-simplicity makes them a basis of that invariant
// subspace) where the identity works; the strictly stable part gets a strict
// Lyapunov solve; the pieces are recombined and symmetrized.
inline MatrixXd neutral_lyapunov(const MatrixXd& a, TimeDomain domain) {
  const int n = static_cast<int>(a.rows());
  if (!is_neutrally_stable_matrix(a, domain)) throw NotNeutrallyStable();
  Eigen::EigenSolver<MatrixXd> es(a, true);
  if (es.info() != Eigen::Success) throw EigensolverFailure("eigensolver did not converge");
  std::vector<int> boundary_idx;
  for (int i = 0; i < n; ++i)
    if (boundary_point(es.eigenvalues()(i), domain)) boundary_idx.push_back(i);
  const int k = static_cast<int>(boundary_idx.size());

  if (k == 0) {
    MatrixXd rhs = -MatrixXd::Identity(n, n);
    MatrixXd p = symmetrize(solve_lyapunov_ct<double>(a, rhs));
    if (domain == TimeDomain::discrete) p = symmetrize(solve_lyapunov_dt<double>(a, rhs));
    return p;
  }

  MatrixXcd vb(n, k);
  for (int j = 0; j < k; ++j) vb.col(j) = es.eigenvectors().col(boundary_idx[j]);

  MatrixXcd basis(n, n);
  int ns = n - k;
  if (ns == 0) {
    basis = vb;
  } else {
    // The strictly stable invariant subspace is the orthogonal complement of
    // the boundary eigenvectors of A^T (left eigenvectors of A), which is
    // robust even when the stable part is defective.
    Eigen::EigenSolver<MatrixXd> est(a.transpose(), true);
    if (est.info() != Eigen::Success) throw EigensolverFailure("eigensolver did not converge");
    std::vector<int> left_idx;
    for (int i = 0; i < n; ++i)
      if (boundary_point(est.eigenvalues()(i), domain)) left_idx.push_back(i);
    if (static_cast<int>(left_idx.size()) != k)
      throw EigensolverFailure("left/right boundary eigenvalue counts disagree");
    MatrixXcd wb(n, k);
    for (int j = 0; j < k; ++j) wb.col(j) = est.eigenvectors().col(left_idx[j]);
    Eigen::JacobiSVD<MatrixXcd> svd(wb.transpose(), Eigen::ComputeFullV);
    basis.leftCols(k) = vb;
    basis.rightCols(ns) = svd.matrixV().rightCols(ns);
  }

  double cond = condition_number(basis);
  if (!(cond <= 1e8)) throw IllConditionedBasis(cond);

  Eigen::FullPivLU<MatrixXcd> lu(basis);
  MatrixXcd inv = lu.inverse();
  MatrixXcd ptil = MatrixXcd::Identity(n, n);
  if (ns > 0) {
    MatrixXcd at = inv * a.cast<Complex>() * basis;
    MatrixXcd as = at.bottomRightCorner(ns, ns);
    MatrixXcd rhs = -MatrixXcd::Identity(ns, ns);
    MatrixXcd ps = domain == TimeDomain::continuous ? solve_lyapunov_ct<Complex>(as, rhs)
                                                    : solve_lyapunov_dt<Complex>(as, rhs);
    ptil.bottomRightCorner(ns, ns) = 0.5 * (ps + ps.adjoint());
  }
  MatrixXcd pc = inv.adjoint() * ptil * inv;
  return symmetrize(pc.real());
}

// Observer gain H with A + HC asymptotically stable, from the dual algebraic
// Riccati equation with identity weights. A zero gain is returned when A is
// already comfortably stable.
inline MatrixXd design_observer(const MatrixXd& a, const MatrixXd& c, TimeDomain domain) {
  const int n = static_cast<int>(a.rows());
  LTIPlant probe{a, MatrixXd::Zero(n, 1), c, domain};
  if (!pbh_detectable(probe)) throw NotDetectable();
  const bool stable_enough = domain == TimeDomain::continuous
                                 ? spectral_abscissa(a) <= -1e-3
                                 : spectral_radius(a) <= 1.0 - 1e-3;
  if (stable_enough) return MatrixXd::Zero(n, c.rows());
  MatrixXd h;
  if (domain == TimeDomain::continuous) {
    MatrixXd s = care_filter(a, c);
    h = -s * c.transpose();
    double abscissa = spectral_abscissa(a + h * c);
    if (!(abscissa <= -1e-3))
      throw RiccatiFailure("observer spectral abscissa " + std::to_string(abscissa));
  } else {
    MatrixXd s = dare_filter(a, c);
    MatrixXd ip = MatrixXd::Identity(c.rows(), c.rows()) + c * s * c.transpose();
    h = -(a * s * c.transpose()) * ip.inverse();
    double rho = spectral_radius(a + h * c);
    if (!(rho <= 1.0 - 1e-3))
      throw RiccatiFailure("observer spectral radius " + std::to_string(rho));
  }
  return h;
}

// epsilon and Q solving (A+HC)'Q + Q(A+HC) + eps Q + I = 0: eps is the full
// stability margin of A+HC and Q comes from the equivalent shifted strict
// Lyapunov equation.
inline std::pair<double, MatrixXd> epsilon_and_Q(const MatrixXd& a_hc) {
  const int n = static_cast<int>(a_hc.rows());
  double alpha = spectral_abscissa(a_hc);
  if (!(alpha < 0.0)) throw NotHurwitz(alpha);
  double eps = -alpha;
  MatrixXd shifted = a_hc + 0.5 * eps * MatrixXd::Identity(n, n);
  MatrixXd q = symmetrize(solve_lyapunov_ct<double>(shifted, -MatrixXd::Identity(n, n)));
  return {eps, q};
}

// Discrete analog: (A+HC)'Q(A+HC) - Q + eps Q + I = 0 with
// eps = (1 - rho^2)/2, solved as a scaled strict Stein equation.
inline std::pair<double, MatrixXd> epsilon_and_Q_dt(const MatrixXd& a_hc) {
  const int n = static_cast<int>(a_hc.rows());
  double rho = spectral_radius(a_hc);
  if (!(rho < 1.0)) throw NotSchur(rho);
  double eps = 0.5 * (1.0 - rho * rho);
  MatrixXd scaled = a_hc / std::sqrt(1.0 - eps);
  MatrixXd q = symmetrize(
      solve_lyapunov_dt<double>(scaled, -MatrixXd::Identity(n, n) / (1.0 - eps)));
  return {eps, q};
}

// Largest dyadic delta in {1, 1/2, ..., 2^-60} with
//   eps Q - 2 delta (QBB'P + PBB'Q) >= 0  and  I - 8 delta (PBB'P + QBB'Q) > 0.
inline double choose_delta(const MatrixXd& p, const MatrixXd& q, const MatrixXd& b, double eps) {
  const int n = static_cast<int>(p.rows());
  MatrixXd bbt = b * b.transpose();
  MatrixXd boun_term = q * bbt * p + p * bbt * q;
  MatrixXd small_term = p * bbt * p + q * bbt * q;
  double delta = 1.0;
  for (int k = 0; k <= 60; ++k, delta *= 0.5) {
    double m1 = min_sym_eig(eps * q - 2.0 * delta * boun_term);
    double m2 = min_sym_eig(MatrixXd::Identity(n, n) - 8.0 * delta * small_term);
    if (m1 >= 0.0 && m2 > 0.0) return delta;
  }
  throw DeltaUnderflow();
}

namespace detail {

inline SynthesisCertificate make_certificate(const LTIPlant& pl, const MatrixXd& p,
                                             const MatrixXd& q, const MatrixXd& h, double eps,
                                             double delta) {
  SynthesisCertificate cert;
  cert.P = p;
  cert.Q = q;
  cert.H = h;
  cert.epsilon = eps;
  cert.delta = delta;
  const MatrixXd a_hc = pl.A + h * pl.C;
  if (pl.domain == TimeDomain::continuous) {
    cert.residual_neutral = max_sym_eig(pl.A.transpose() * p + p * pl.A);
    cert.residual_lyap = operator_norm(a_hc.transpose() * q + q * a_hc + eps * q +
                                       MatrixXd::Identity(pl.n(), pl.n()));
  } else {
    cert.residual_neutral = max_sym_eig(pl.A.transpose() * p * pl.A - p);
    cert.residual_lyap = operator_norm(a_hc.transpose() * q * a_hc - q + eps * q +
                                       MatrixXd::Identity(pl.n(), pl.n()));
  }
  MatrixXd bbt = pl.B * pl.B.transpose();
  cert.margin_boun = min_sym_eig(eps * q - 2.0 * delta * (q * bbt * p + p * bbt * q));
  cert.margin_small = min_sym_eig(MatrixXd::Identity(pl.n(), pl.n()) -
                                  8.0 * delta * (p * bbt * p + q * bbt * q));
  return cert;
}

}  // namespace detail

// Constructive local-bounds design for continuous-time neutrally stable
// agents: observer-based protocol x_c^+ = (A+HC) x_c - H z, u = -delta B'P x_c.
// Asymptotically stable agents get the zero protocol (with a certificate for
// the same inequalities, which are then unconstrained).
inline std::pair<Protocol, SynthesisCertificate> synthesize_ct_with_bounds(const LTIPlant& pl) {
  pl.validate();
  if (pl.domain != TimeDomain::continuous) throw ConditionsNotMet("continuous-time plant");
  if (!pbh_stabilizable(pl)) throw ConditionsNotMet("stabilizable");
  if (!pbh_detectable(pl)) throw ConditionsNotMet("detectable");
  if (is_asymptotically_stable(pl.A, pl.domain)) {
    MatrixXd p = symmetrize(solve_lyapunov_ct<double>(pl.A, -MatrixXd::Identity(pl.n(), pl.n())));
    auto [eps, q] = epsilon_and_Q(pl.A);
    double delta = choose_delta(p, q, pl.B, eps);
    MatrixXd h = MatrixXd::Zero(pl.n(), pl.p());
    return {Protocol::zero(pl, Scaling::local_bounds),
            detail::make_certificate(pl, p, q, h, eps, delta)};
  }
  if (!is_neutrally_stable(pl)) throw ConditionsNotMet("neutrally stable");
  MatrixXd p = neutral_lyapunov(pl.A, pl.domain);
  MatrixXd h = design_observer(pl.A, pl.C, pl.domain);
  auto [eps, q] = epsilon_and_Q(pl.A + h * pl.C);
  double delta = choose_delta(p, q, pl.B, eps);
  Protocol pr;
  pr.Ac = pl.A + h * pl.C;
  pr.Bc = -h;
  pr.Fc = -delta * pl.B.transpose() * p;
  pr.Dc = MatrixXd::Zero(pl.m(), pl.p());
  pr.scaling = Scaling::local_bounds;
  return {pr, detail::make_certificate(pl, p, q, h, eps, delta)};
}

// Discrete-time analog of the same observer-based shape with low-gain
// feedback u = -delta B'PA x_c. The paper defers the discrete construction
// to an external reference, so this design is validated empirically: delta
// is halved from the inequality-feasible value until the unit-disc grid
// passes, and the final grid margin is recorded in the certificate.
inline std::pair<Protocol, SynthesisCertificate> synthesize_dt_with_bounds(const LTIPlant& pl) {
  pl.validate();
  if (pl.domain != TimeDomain::discrete) throw ConditionsNotMet("discrete-time plant");
  if (!pbh_stabilizable(pl)) throw ConditionsNotMet("stabilizable");
  if (!pbh_detectable(pl)) throw ConditionsNotMet("detectable");
  if (is_asymptotically_stable(pl.A, pl.domain)) {
    MatrixXd p = symmetrize(solve_lyapunov_dt<double>(pl.A, -MatrixXd::Identity(pl.n(), pl.n())));
    auto [eps, q] = epsilon_and_Q_dt(pl.A);
    double delta = choose_delta(p, q, pl.B, eps);
    MatrixXd h = MatrixXd::Zero(pl.n(), pl.p());
    auto cert = detail::make_certificate(pl, p, q, h, eps, delta);
    Protocol pr = Protocol::zero(pl, Scaling::local_bounds);
    cert.grid_margin = grid_verify(pl, pr, Variant::P5).worst_margin;
    return {pr, cert};
  }
  if (!is_neutrally_stable(pl)) throw ConditionsNotMet("neutrally stable");
  MatrixXd p = neutral_lyapunov(pl.A, pl.domain);
  MatrixXd h = design_observer(pl.A, pl.C, pl.domain);
  auto [eps, q] = epsilon_and_Q_dt(pl.A + h * pl.C);
  double delta = choose_delta(p, q, pl.B, eps);
  Protocol pr;
  pr.Ac = pl.A + h * pl.C;
  pr.Bc = -h;
  pr.Dc = MatrixXd::Zero(pl.m(), pl.p());
  pr.scaling = Scaling::local_bounds;
  while (delta >= std::pow(2.0, -60)) {
    pr.Fc = -delta * pl.B.transpose() * p * pl.A;
    GridReport rep = grid_verify(pl, pr, Variant::P5);
    if (rep.pass) {
      auto cert = detail::make_certificate(pl, p, q, h, eps, delta);
      cert.grid_margin = rep.worst_margin;
      return {pr, cert};
    }
    delta *= 0.5;
  }
  throw GridSearchFailure();
}

}  // namespace syncfree
