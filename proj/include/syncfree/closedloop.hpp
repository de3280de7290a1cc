#pragma once

#include <optional>

#include "syncfree/graph.hpp"
#include "syncfree/protocol.hpp"

namespace syncfree {

// Variant of the lambda-parameterized closed loop: P4 couples through the
// raw network signal (coefficient lambda), P5 through the locally scaled one
// (coefficient 1 - lambda).
enum class Variant { P4, P5 };

inline std::string to_string(Variant v) { return v == Variant::P4 ? "p4" : "p5"; }

inline Variant parse_variant(const std::string& s) {
  if (s == "p4" || s == "P4") return Variant::P4;
  if (s == "p5" || s == "P5") return Variant::P5;
  throw ParseError("unknown variant '" + s + "'");
}

inline Scaling scaling_for(Variant v) {
  return v == Variant::P4 ? Scaling::none : Scaling::local_bounds;
}

struct ModalClosedLoop {
  Complex lambda;
  Variant variant;
  MatrixXcd matrix;  // (n + n_c) x (n + n_c)
};

// Assemble [[A + k B Dc C, B Fc], [k Bc C, Ac]] with k = lambda (P4) or
// 1 - lambda (P5). For static protocols (n_c = 0) this is A + k B Dc C.
inline ModalClosedLoop modal_matrix(const LTIPlant& pl, const Protocol& pr, Complex lambda,
                                    Variant variant) {
  pl.validate();
  pr.validate_for(pl);
  if (pr.scaling != scaling_for(variant))
    throw VariantMismatch("protocol scaling '" + to_string(pr.scaling) +
                          "' does not match variant '" + to_string(variant) + "'");
  const Complex k = variant == Variant::P4 ? lambda : Complex(1.0) - lambda;
  const int n = pl.n(), nc = pr.nc();
  ModalClosedLoop out;
  out.lambda = lambda;
  out.variant = variant;
  out.matrix = MatrixXcd::Zero(n + nc, n + nc);
  out.matrix.topLeftCorner(n, n) =
      pl.A.cast<Complex>() + k * (pl.B * pr.Dc * pl.C).cast<Complex>();
  if (nc > 0) {
    out.matrix.topRightCorner(n, nc) = (pl.B * pr.Fc).cast<Complex>();
    out.matrix.bottomLeftCorner(nc, n) = k * (pr.Bc * pl.C).cast<Complex>();
    out.matrix.bottomRightCorner(nc, nc) = pr.Ac.cast<Complex>();
  }
  return out;
}

inline double modal_margin(const LTIPlant& pl, const Protocol& pr, Complex lambda,
                           Variant variant) {
  return stability_margin(modal_matrix(pl, pr, lambda, variant).matrix, pl.domain);
}

// Sampling grid over the quantified-lambda region. The defaults follow the
// proofs: P4 sweeps the open right half plane in polar form, P5 sweeps the
// open unit disc plus dedicated samples approaching 1.
struct GridSpec {
  Variant variant = Variant::P4;
  // P4 polar sweep
  double r_min = 1e-3, r_max = 1e3;
  int n_r = 40, n_theta_p4 = 41;
  double theta_margin = 1e-3;
  // P5 disc sweep
  double rho_max = 0.999;
  int n_rho = 40, n_theta_p5 = 48;
  std::vector<int> near_one_ks = {1, 2, 3, 4, 5, 6};
  // pass rule
  double threshold = 1e-6;
  // when nonempty, overrides the generated grid
  std::vector<Complex> explicit_lambdas;

  static GridSpec defaults(Variant v) {
    GridSpec g;
    g.variant = v;
    return g;
  }

  std::vector<Complex> samples() const {
    if (!explicit_lambdas.empty()) return explicit_lambdas;
    std::vector<Complex> out;
    if (variant == Variant::P4) {
      auto radii = logspace(r_min, r_max, n_r);
      auto thetas = linspace(-1.5707963267948966 + theta_margin,
                             1.5707963267948966 - theta_margin, n_theta_p4);
      for (double r : radii)
        for (double th : thetas) out.push_back(std::polar(r, th));
    } else {
      auto rhos = linspace(0.0, rho_max, n_rho);
      for (double rho : rhos)
        for (int k = 0; k < n_theta_p5; ++k)
          out.push_back(std::polar(rho, 6.283185307179586 * k / n_theta_p5));
      for (int k : near_one_ks) out.push_back(Complex(1.0 - std::pow(10.0, -k), 0.0));
    }
    return out;
  }

  // Distance of the coupling coefficient from its degenerate limit; margins
  // are judged relative to it because the attainable margin vanishes
  // linearly as the coefficient does (lambda -> 0 for P4, lambda -> 1 for P5).
  double coefficient_distance(Complex lambda) const {
    double d = variant == Variant::P4 ? lambda.real() : std::abs(Complex(1.0) - lambda);
    return std::clamp(d, 1e-12, 1.0);
  }
};

struct GridSample {
  Complex lambda;
  double margin = 0.0;             // -max Re eig (ct) or 1 - spectral radius (dt)
  double normalized_margin = 0.0;  // margin / coefficient_distance(lambda)
  std::string error;               // per-sample eigensolver failure, if any
};

struct GridReport {
  Variant variant = Variant::P4;
  TimeDomain domain = TimeDomain::continuous;
  GridSpec spec;
  std::vector<GridSample> samples;
  double worst_margin = 0.0;  // min normalized margin over all samples
  bool pass = false;          // worst_margin > spec.threshold and no sample errors
  // P4 only: margin monotone in r over the 5 largest radii on every ray,
  // supporting extrapolation beyond the radius cap.
  std::optional<bool> high_gain_margin_monotone;
};

inline GridReport grid_verify(const LTIPlant& pl, const Protocol& pr, Variant variant,
                              const GridSpec& spec_in = {}) {
  GridSpec spec = spec_in;
  spec.variant = variant;
  GridReport rep;
  rep.variant = variant;
  rep.domain = pl.domain;
  rep.spec = spec;
  auto lambdas = spec.samples();
  std::sort(lambdas.begin(), lambdas.end(), complex_less);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  bool any_error = false;
  for (const auto& lam : lambdas) {
    GridSample s;
    s.lambda = lam;
    try {
      s.margin = modal_margin(pl, pr, lam, variant);
      s.normalized_margin = s.margin / spec.coefficient_distance(lam);
      rep.worst_margin = std::min(rep.worst_margin, s.normalized_margin);
    } catch (const EigensolverFailure& e) {
      s.error = e.what();
      any_error = true;
    }
    rep.samples.push_back(std::move(s));
  }
  rep.pass = !any_error && rep.worst_margin > spec.threshold;
  if (variant == Variant::P4 && spec.explicit_lambdas.empty()) {
    // check margin growth along each ray at the 5 largest radii
    auto radii = logspace(spec.r_min, spec.r_max, spec.n_r);
    auto thetas = linspace(-1.5707963267948966 + spec.theta_margin,
                           1.5707963267948966 - spec.theta_margin, spec.n_theta_p4);
    bool monotone = true;
    const int tail = std::min<int>(5, spec.n_r);
    for (double th : thetas) {
      double prev = -std::numeric_limits<double>::infinity();
      for (int i = spec.n_r - tail; i < spec.n_r; ++i) {
        double m;
        try {
          m = modal_margin(pl, pr, std::polar(radii[i], th), variant);
        } catch (const EigensolverFailure&) {
          monotone = false;
          break;
        }
        if (m < prev - 1e-12) {
          monotone = false;
          break;
        }
        prev = m;
      }
      if (!monotone) break;
    }
    rep.high_gain_margin_monotone = monotone;
  }
  return rep;
}

// Necessary positive-real screen over the frequency axis. The loop product
// is evaluated with the negative-feedback sign extracted: for the modal loop
// det(I - lambda G G_c) to be stable on the whole quantified region, the
// function Phi = -G G_c (single-output) or -G_c G (single-input) must be
// positive real (P4) or satisfy Re Phi + 1/2 >= 0 (P5) on the axis.
struct PositiveRealReport {
  bool passes = true;
  Complex worst_frequency;  // axis point of the most negative real part
  double worst_value = std::numeric_limits<double>::infinity();
  int checked = 0;
};

inline PositiveRealReport positive_real_check(const LTIPlant& pl, const Protocol& pr,
                                              Variant variant) {
  pl.validate();
  pr.validate_for(pl);
  if (!has_scalar_channel(pl)) throw NotScalarChannel();
  const bool single_output = pl.p() == 1;
  auto poles_a = spectrum(pl.A);
  auto poles_c = pr.nc() > 0 ? spectrum(pr.Ac) : std::vector<Complex>{};
  auto near_pole = [&](Complex s) {
    for (const auto& z : poles_a)
      if (std::abs(s - z) < 1e-6) return true;
    for (const auto& z : poles_c)
      if (std::abs(s - z) < 1e-6) return true;
    return false;
  };
  auto gc_at = [&](Complex s) -> MatrixXcd {
    MatrixXcd gc = pr.Dc.cast<Complex>();
    if (pr.nc() > 0) gc += evaluate_transfer_matrices(pr.Ac, pr.Bc, pr.Fc, s);
    return gc;
  };
  std::vector<Complex> points;
  if (pl.domain == TimeDomain::continuous) {
    for (double w : logspace(1e-4, 1e4, 2000)) {
      points.push_back(Complex(0.0, w));
      points.push_back(Complex(0.0, -w));
    }
  } else {
    for (int k = 0; k < 2000; ++k) points.push_back(std::polar(1.0, 6.283185307179586 * k / 2000));
  }
  PositiveRealReport rep;
  const double offset = variant == Variant::P4 ? 0.0 : 0.5;
  for (const auto& s : points) {
    if (near_pole(s)) continue;
    MatrixXcd g = evaluate_transfer_matrices(pl.A, pl.B, pl.C, s);
    MatrixXcd gc = gc_at(s);
    Complex phi = single_output ? -(g * gc)(0, 0) : -(gc * g)(0, 0);
    double value = phi.real() + offset;
    ++rep.checked;
    if (value < rep.worst_value) {
      rep.worst_value = value;
      rep.worst_frequency = s;
    }
  }
  rep.passes = rep.worst_value >= -1e-9;
  return rep;
}

// Theorem-5 falsifier: doubling search over lambda magnitudes 2^0..2^60 on
// the positive real axis and at angles +-pi/4 until the P4 modal matrix
// leaves the closed unit disc. NoViolationFound only in the trivial case
// (characteristic polynomial independent of lambda and A-tilde Schur).
struct FalsifierResult {
  bool found = false;
  Complex lambda_star;
  double spectral_radius = 0.0;
  bool trivial_case = false;  // lambda-independent characteristic polynomial, Schur A-tilde
};

inline bool charpoly_lambda_independent(const LTIPlant& pl, const Protocol& pr) {
  auto c1 = charpoly<Complex>(modal_matrix(pl, pr, Complex(1.0), Variant::P4).matrix);
  auto c2 = charpoly<Complex>(modal_matrix(pl, pr, Complex(2.0), Variant::P4).matrix);
  for (size_t i = 0; i < c1.size(); ++i) {
    double scale = std::max({1.0, std::abs(c1[i]), std::abs(c2[i])});
    if (std::abs(c1[i] - c2[i]) > 1e-9 * scale) return false;
  }
  return true;
}

inline FalsifierResult falsify_dt_no_bounds(const LTIPlant& pl, const Protocol& pr) {
  pl.validate();
  pr.validate_for(pl);
  if (pl.domain != TimeDomain::discrete) throw Error("falsifier applies to discrete-time plants");
  if (pr.scaling != Scaling::none) throw VariantMismatch("falsifier requires scaling 'none'");
  FalsifierResult res;
  if (charpoly_lambda_independent(pl, pr)) {
    double rho = spectral_radius(modal_matrix(pl, pr, Complex(0.0), Variant::P4).matrix);
    if (rho < 1.0) {
      res.trivial_case = true;
      return res;
    }
  }
  const double angles[3] = {0.0, 0.7853981633974483, -0.7853981633974483};
  for (int k = 0; k <= 60; ++k) {
    const double mag = std::pow(2.0, k);
    for (double ang : angles) {
      Complex lam = std::polar(mag, ang);
      double rho = spectral_radius(modal_matrix(pl, pr, lam, Variant::P4).matrix);
      if (rho > 1.0 + 1e-6) {
        res.found = true;
        res.lambda_star = lam;
        res.spectral_radius = rho;
        return res;
      }
    }
  }
  return res;  // not found, not trivial: anomalous, left to the caller
}

// Stability of the closed network: every graph eigenvalue other than the
// synchronization mode must give an asymptotically stable modal matrix.
struct NetworkMargin {
  bool pass = false;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::vector<Complex> lambdas;  // the eigenvalues that were checked
};

inline NetworkMargin network_margin(const LTIPlant& pl, const Protocol& pr,
                                    const WeightedDigraph& g,
                                    const std::optional<LocalBounds>& bounds) {
  if (!has_directed_spanning_tree(g)) throw NoSpanningTree();
  if ((pr.scaling == Scaling::local_bounds) != bounds.has_value())
    throw VariantMismatch("bounds must be present exactly when the protocol uses local scaling");
  NetworkMargin out;
  if (pr.scaling == Scaling::none) {
    auto l = build_laplacian(g);
    double tol = kBoundaryTol * std::max(1.0, l.entries.cwiseAbs().rowwise().sum().maxCoeff());
    for (const auto& lam : laplacian_spectrum(l))
      if (std::abs(lam) > tol) out.lambdas.push_back(lam);
    for (const auto& lam : out.lambdas)
      out.worst_margin = std::min(out.worst_margin, modal_margin(pl, pr, lam, Variant::P4));
  } else {
    auto d = to_row_stochastic(g, *bounds);
    for (const auto& lam : row_stochastic_spectrum(d))
      if (std::abs(lam - Complex(1.0)) > kBoundaryTol) out.lambdas.push_back(lam);
    for (const auto& lam : out.lambdas)
      out.worst_margin = std::min(out.worst_margin, modal_margin(pl, pr, lam, Variant::P5));
  }
  if (out.lambdas.empty()) out.worst_margin = std::numeric_limits<double>::infinity();
  out.pass = out.worst_margin > 1e-9;
  return out;
}

inline bool network_stability_check(const LTIPlant& pl, const Protocol& pr,
                                    const WeightedDigraph& g,
                                    const std::optional<LocalBounds>& bounds) {
  return network_margin(pl, pr, g, bounds).pass;
}

// Trajectory of the transformed modal pair (phi, psi) from the local-bounds
// sufficiency proof, with the Lyapunov samples V1 = e*Q e, V2 = phit*P phit
// where phit = (1-lambda) phi and e = psi - phit.
struct ModalTrace {
  std::vector<double> times;
  std::vector<VectorXcd> phi, psi;
  std::vector<double> v1, v2;

  double v_total(size_t i) const { return v1[i] + v2[i]; }
};

inline ModalTrace modal_simulate(const LTIPlant& pl, const Protocol& pr, const MatrixXd& p_mat,
                                 const MatrixXd& q_mat, Complex lambda, const VectorXcd& phi0,
                                 const VectorXcd& psi0, double t_end, double h) {
  pl.validate();
  pr.validate_for(pl);
  if (pl.domain != TimeDomain::continuous)
    throw Error("modal simulation applies to the continuous-time construction");
  if (!(std::abs(lambda) < 1.0)) throw Error("modal simulation requires |lambda| < 1");
  const Complex mu = Complex(1.0) - lambda;
  const int n = pl.n(), nc = pr.nc();
  if (phi0.size() != n || psi0.size() != nc) throw DimensionMismatch("modal state sizes");
  MatrixXcd a11 = pl.A.cast<Complex>();
  MatrixXcd a12 = (pl.B * pr.Fc).cast<Complex>();
  MatrixXcd a21 = mu * (pr.Bc * pl.C).cast<Complex>();
  MatrixXcd a22 = pr.Ac.cast<Complex>();
  auto deriv = [&](const VectorXcd& ph, const VectorXcd& ps, VectorXcd& dph, VectorXcd& dps) {
    dph = a11 * ph + a12 * ps;
    dps = a21 * ph + a22 * ps;
  };
  ModalTrace tr;
  VectorXcd ph = phi0, ps = psi0;
  auto record = [&](double t) {
    VectorXcd phit = mu * ph;
    VectorXcd e = ps - phit;
    tr.times.push_back(t);
    tr.phi.push_back(ph);
    tr.psi.push_back(ps);
    tr.v1.push_back((e.adjoint() * q_mat.cast<Complex>() * e)(0).real());
    tr.v2.push_back((phit.adjoint() * p_mat.cast<Complex>() * phit)(0).real());
  };
  record(0.0);
  const int steps = static_cast<int>(std::ceil(t_end / h));
  VectorXcd k1p(n), k1s(nc), k2p(n), k2s(nc), k3p(n), k3s(nc), k4p(n), k4s(nc);
  for (int i = 1; i <= steps; ++i) {
    double v_before = tr.v1.back() + tr.v2.back();
    deriv(ph, ps, k1p, k1s);
    deriv(ph + 0.5 * h * k1p, ps + 0.5 * h * k1s, k2p, k2s);
    deriv(ph + 0.5 * h * k2p, ps + 0.5 * h * k2s, k3p, k3s);
    deriv(ph + h * k3p, ps + h * k3s, k4p, k4s);
    ph += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    ps += (h / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
    record(i * h);
    double v_after = tr.v1.back() + tr.v2.back();
    if (v_after > 10.0 * v_before + 1e-12) throw StepSizeTooLarge();
  }
  return tr;
}

}  // namespace syncfree
