#pragma once

#include <optional>
#include <string>
#include <vector>

#include "syncfree/linalg.hpp"

namespace syncfree {

// Agent model x^+ = A x + B u, y = C x (no direct feedthrough).
struct LTIPlant {
  MatrixXd A, B, C;
  TimeDomain domain = TimeDomain::continuous;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }

  void validate() const {
    if (A.rows() < 1 || A.rows() != A.cols()) throw DimensionMismatch("A must be square, n >= 1");
    if (B.rows() != A.rows() || B.cols() < 1) throw DimensionMismatch("B must be n x m, m >= 1");
    if (C.cols() != A.rows() || C.rows() < 1) throw DimensionMismatch("C must be p x n, p >= 1");
  }
};

enum class IoShape { SISO, SIMO, MISO, MIMO };

inline IoShape io_shape(const LTIPlant& pl) {
  if (pl.m() == 1 && pl.p() == 1) return IoShape::SISO;
  if (pl.m() == 1) return IoShape::SIMO;
  if (pl.p() == 1) return IoShape::MISO;
  return IoShape::MIMO;
}

inline std::string to_string(IoShape s) {
  switch (s) {
    case IoShape::SISO: return "SISO";
    case IoShape::SIMO: return "SIMO";
    case IoShape::MISO: return "MISO";
    case IoShape::MIMO: return "MIMO";
  }
  return "?";
}

inline bool has_scalar_channel(const LTIPlant& pl) { return pl.m() == 1 || pl.p() == 1; }

// Region predicates with the fixed absolute boundary tolerance.
inline bool strictly_stable_point(Complex z, TimeDomain d) {
  return d == TimeDomain::continuous ? z.real() < -kBoundaryTol : std::abs(z) < 1.0 - kBoundaryTol;
}
inline bool boundary_point(Complex z, TimeDomain d) {
  return d == TimeDomain::continuous ? std::abs(z.real()) <= kBoundaryTol
                                     : std::abs(std::abs(z) - 1.0) <= kBoundaryTol;
}
inline bool in_closed_region(Complex z, TimeDomain d) {
  return strictly_stable_point(z, d) || boundary_point(z, d);
}

enum class PoleLocation { open_stable, closed_stable, unstable };

inline std::string to_string(PoleLocation p) {
  switch (p) {
    case PoleLocation::open_stable: return "open_stable";
    case PoleLocation::closed_stable: return "closed_stable";
    case PoleLocation::unstable: return "unstable";
  }
  return "?";
}

inline PoleLocation pole_location(const MatrixXd& a, TimeDomain d) {
  bool any_boundary = false;
  for (const auto& z : spectrum(a)) {
    if (!in_closed_region(z, d)) return PoleLocation::unstable;
    if (!strictly_stable_point(z, d)) any_boundary = true;
  }
  return any_boundary ? PoleLocation::closed_stable : PoleLocation::open_stable;
}

inline bool is_asymptotically_stable(const MatrixXd& a, TimeDomain d) {
  return pole_location(a, d) == PoleLocation::open_stable;
}

// PBH test: rank [lambda I - A, B] = n at every eigenvalue in the closed
// unstable region.
inline bool pbh_stabilizable(const LTIPlant& pl) {
  pl.validate();
  const int n = pl.n();
  for (const auto& z : spectrum(pl.A)) {
    if (strictly_stable_point(z, pl.domain)) continue;
    MatrixXcd pencil(n, n + pl.m());
    pencil.leftCols(n) = z * MatrixXcd::Identity(n, n) - pl.A.cast<Complex>();
    pencil.rightCols(pl.m()) = pl.B.cast<Complex>();
    if (rank_svd(pencil) < n) return false;
  }
  return true;
}

inline bool pbh_detectable(const LTIPlant& pl) {
  pl.validate();
  const int n = pl.n();
  for (const auto& z : spectrum(pl.A)) {
    if (strictly_stable_point(z, pl.domain)) continue;
    MatrixXcd pencil(n + pl.p(), n);
    pencil.topRows(n) = z * MatrixXcd::Identity(n, n) - pl.A.cast<Complex>();
    pencil.bottomRows(pl.p()) = pl.C.cast<Complex>();
    if (rank_svd(pencil) < n) return false;
  }
  return true;
}

// Neutral stability: all eigenvalues in the closed stable region, and each
// boundary eigenvalue semi-simple (geometric = algebraic multiplicity).
inline bool is_neutrally_stable_matrix(const MatrixXd& a, TimeDomain d) {
  auto eigs = spectrum(a);
  const int n = static_cast<int>(a.rows());
  for (const auto& z : eigs)
    if (!in_closed_region(z, d)) return false;
  std::vector<bool> used(eigs.size(), false);
  for (size_t i = 0; i < eigs.size(); ++i) {
    if (used[i] || !boundary_point(eigs[i], d)) continue;
    int mult = 0;
    for (size_t j = 0; j < eigs.size(); ++j)
      if (std::abs(eigs[j] - eigs[i]) <= kBoundaryTol) {
        ++mult;
        used[j] = true;
      }
    MatrixXcd shifted = a.cast<Complex>() - eigs[i] * MatrixXcd::Identity(n, n);
    if (rank_svd(shifted) != n - mult) return false;
  }
  return true;
}

inline bool is_neutrally_stable(const LTIPlant& pl) {
  pl.validate();
  return is_neutrally_stable_matrix(pl.A, pl.domain);
}

// G(s) = C (sI - A)^{-1} B by linear solve; PoleAt if s hits the spectrum.
struct TransferEvaluation {
  Complex s;
  MatrixXcd value;  // p x m
};

inline MatrixXcd evaluate_transfer_matrices(const MatrixXd& a, const MatrixXd& b,
                                            const MatrixXd& c, Complex s) {
  const int n = static_cast<int>(a.rows());
  for (const auto& z : spectrum(a))
    if (std::abs(s - z) < 1e-10) throw PoleAt(s);
  MatrixXcd m = s * MatrixXcd::Identity(n, n) - a.cast<Complex>();
  return c.cast<Complex>() * m.fullPivLu().solve(b.cast<Complex>());
}

inline TransferEvaluation evaluate_transfer(const LTIPlant& pl, Complex s) {
  pl.validate();
  return {s, evaluate_transfer_matrices(pl.A, pl.B, pl.C, s)};
}

namespace detail {

inline MatrixXcd rosenbrock_pencil(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c,
                                   Complex s) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  const int p = static_cast<int>(c.rows());
  MatrixXcd r = MatrixXcd::Zero(n + p, n + m);
  r.topLeftCorner(n, n) = s * MatrixXcd::Identity(n, n) - a.cast<Complex>();
  r.topRightCorner(n, m) = -b.cast<Complex>();
  r.bottomLeftCorner(p, n) = c.cast<Complex>();
  return r;
}

inline int pencil_normal_rank(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c) {
  Rng rng(0xA11CE);
  int best = 0;
  for (int k = 0; k < 3; ++k) {
    Complex s(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
    best = std::max(best, rank_svd(rosenbrock_pencil(a, b, c, s)));
  }
  return best;
}

// Finite generalized eigenvalues of the square Rosenbrock pencil.
inline std::vector<Complex> square_pencil_zeros(const MatrixXd& a, const MatrixXd& b,
                                                const MatrixXd& c) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  const int p = static_cast<int>(c.rows());
  MatrixXd f = MatrixXd::Zero(n + p, n + m), e = MatrixXd::Zero(n + p, n + m);
  f.topLeftCorner(n, n) = a;
  f.topRightCorner(n, m) = b;
  f.bottomLeftCorner(p, n) = -c;
  e.topLeftCorner(n, n).setIdentity();
  Eigen::GeneralizedEigenSolver<MatrixXd> ges(f, e, false);
  if (ges.info() != Eigen::Success) throw EigensolverFailure("pencil QZ did not converge");
  const double scale = f.norm() + 1.0;
  std::vector<Complex> zeros;
  for (int i = 0; i < f.rows(); ++i) {
    Complex alpha = ges.alphas()(i);
    double beta = ges.betas()(i);
    if (std::abs(beta) > 1e-10 * (std::abs(alpha) + scale)) zeros.push_back(alpha / beta);
  }
  sort_spectrum(zeros);
  return zeros;
}

}  // namespace detail

// Finite invariant zeros of the Rosenbrock pencil [sI-A, -B; C, 0].
// Square systems go straight to a generalized eigensolve. Non-square systems
// are squared down twice with independent seeded random full-rank maps; the
// two zero sets are intersected and every surviving candidate is re-validated
// by an explicit rank drop of the original pencil.
inline std::vector<Complex> invariant_zeros(const LTIPlant& pl) {
  pl.validate();
  const int minio = std::min(pl.m(), pl.p());
  const int normal_rank = detail::pencil_normal_rank(pl.A, pl.B, pl.C);
  if (normal_rank < pl.n() + minio) throw DegeneratePencil();
  auto validate = [&](Complex s) {
    return rank_svd(detail::rosenbrock_pencil(pl.A, pl.B, pl.C, s)) < normal_rank;
  };
  std::vector<Complex> candidates;
  if (pl.m() == pl.p()) {
    candidates = detail::square_pencil_zeros(pl.A, pl.B, pl.C);
  } else {
    auto squared = [&](std::uint64_t seed) {
      Rng rng(seed);
      if (pl.m() > pl.p()) {
        MatrixXd map(pl.m(), pl.p());
        for (int i = 0; i < map.rows(); ++i)
          for (int j = 0; j < map.cols(); ++j) map(i, j) = rng.normal();
        return detail::square_pencil_zeros(pl.A, pl.B * map, pl.C);
      }
      MatrixXd map(pl.m(), pl.p());
      for (int i = 0; i < map.rows(); ++i)
        for (int j = 0; j < map.cols(); ++j) map(i, j) = rng.normal();
      return detail::square_pencil_zeros(pl.A, pl.B, map * pl.C);
    };
    auto set1 = squared(0x5EED1);
    auto set2 = squared(0x5EED2);
    for (const auto& z : set1) {
      for (const auto& w : set2)
        if (std::abs(z - w) <= 1e-6) {
          candidates.push_back(z);
          break;
        }
    }
  }
  std::vector<Complex> zeros;
  for (const auto& z : candidates)
    if (validate(z)) zeros.push_back(z);
  sort_spectrum(zeros);
  return zeros;
}

// Semi-simplicity limit test for a boundary zero of a scalar-channel plant:
// G(s)/(s - s0) evaluated along 4 approach directions at radii 1e-3..1e-5
// must be consistent (bounded ratios between radii, bounded spread across
// directions) and bounded away from zero.
namespace detail {
inline bool boundary_zero_semisimple(const LTIPlant& pl, Complex s0) {
  const double radii[3] = {1e-3, 1e-4, 1e-5};
  double level[3];
  double scale = pl.B.norm() * pl.C.norm() + 1e-30;
  for (int r = 0; r < 3; ++r) {
    double vals[4];
    for (int k = 0; k < 4; ++k) {
      Complex dir = std::polar(radii[r], k * 1.5707963267948966 + 0.3);
      MatrixXcd g;
      try {
        g = evaluate_transfer_matrices(pl.A, pl.B, pl.C, s0 + dir);
      } catch (const PoleAt&) {
        return false;
      }
      vals[k] = (g / dir).norm();
    }
    double lo = *std::min_element(vals, vals + 4), hi = *std::max_element(vals, vals + 4);
    if (hi > 3.0 * lo + 1e-12 * scale) return false;  // direction-dependent limit
    level[r] = 0.25 * (vals[0] + vals[1] + vals[2] + vals[3]);
  }
  if (level[2] < 1e-8 * scale) return false;  // limit vanishes: multiplicity >= 2
  for (int r = 0; r + 1 < 3; ++r) {
    double ratio = level[r + 1] / (level[r] + 1e-300);
    if (ratio < 0.3 || ratio > 3.0) return false;  // still trending with the radius
  }
  return true;
}
}  // namespace detail

inline bool is_weakly_minimum_phase(const LTIPlant& pl) {
  pl.validate();
  if (!has_scalar_channel(pl)) throw NotScalarChannel();
  for (const auto& z : invariant_zeros(pl)) {
    if (!in_closed_region(z, pl.domain)) return false;
    if (!strictly_stable_point(z, pl.domain) && !detail::boundary_zero_semisimple(pl, z))
      return false;
  }
  return true;
}

inline bool is_minimum_phase(const LTIPlant& pl) {
  for (const auto& z : invariant_zeros(pl))
    if (!strictly_stable_point(z, pl.domain)) return false;
  return true;
}

// SISO: smallest k >= 1 with |C A^{k-1} B| above threshold. Square MIMO:
// smallest k with C A^{k-1} B nonzero, which must then be nonsingular
// (uniform rank); otherwise absent.
inline std::optional<int> relative_degree(const LTIPlant& pl) {
  pl.validate();
  const double thresh = 1e-10 * pl.C.norm() * pl.B.norm();
  MatrixXd power = MatrixXd::Identity(pl.n(), pl.n());
  for (int k = 1; k <= pl.n(); ++k) {
    MatrixXd markov = pl.C * power * pl.B;
    if (markov.cwiseAbs().maxCoeff() > thresh) {
      if (pl.m() == 1 && pl.p() == 1) return k;
      if (pl.m() != pl.p()) return std::nullopt;  // uniform rank undefined off-square
      return rank_svd(markov) == pl.m() ? std::optional<int>(k) : std::nullopt;
    }
    power = pl.A * power;
  }
  return std::nullopt;
}

struct StructuralReport {
  bool stabilizable = false;
  bool detectable = false;
  PoleLocation poles = PoleLocation::unstable;
  bool neutrally_stable = false;
  std::vector<Complex> invariant_zeros;
  bool minimum_phase = false;
  std::optional<bool> weakly_minimum_phase;  // decided only for scalar channels
  std::optional<int> relative_degree;
  IoShape shape = IoShape::SISO;
};

inline StructuralReport structural_report(const LTIPlant& pl) {
  pl.validate();
  StructuralReport r;
  r.stabilizable = pbh_stabilizable(pl);
  r.detectable = pbh_detectable(pl);
  r.poles = pole_location(pl.A, pl.domain);
  r.neutrally_stable = is_neutrally_stable(pl);
  r.invariant_zeros = invariant_zeros(pl);
  r.minimum_phase = is_minimum_phase(pl);
  if (has_scalar_channel(pl))
    r.weakly_minimum_phase = is_weakly_minimum_phase(pl);
  else if (r.minimum_phase)
    r.weakly_minimum_phase = true;
  r.relative_degree = relative_degree(pl);
  r.shape = io_shape(pl);
  return r;
}

enum class Problem { P4_no_bounds, P5_with_bounds };
enum class Verdict { solvable_by_sufficiency, ruled_out_by_necessity, gap };

inline std::string to_string(Problem p) {
  return p == Problem::P4_no_bounds ? "P4_no_bounds" : "P5_with_bounds";
}
inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::solvable_by_sufficiency: return "solvable_by_sufficiency";
    case Verdict::ruled_out_by_necessity: return "ruled_out_by_necessity";
    case Verdict::gap: return "gap";
  }
  return "?";
}

struct Condition {
  std::string name;
  bool passed;
};

struct SolvabilityVerdict {
  Problem problem;
  TimeDomain domain;
  Verdict verdict;
  std::string cited_theorem;
  std::vector<Condition> conditions;

  bool any_failed() const {
    for (const auto& c : conditions)
      if (!c.passed) return true;
    return false;
  }
};

// Solvability classification against the necessity/sufficiency theorem pairs.
// Verdicts that fall between a passed necessity set and a failed sufficiency
// set are reported as an explicit gap, never guessed.
inline SolvabilityVerdict classify(const LTIPlant& pl, Problem problem) {
  pl.validate();
  SolvabilityVerdict v;
  v.problem = problem;
  v.domain = pl.domain;
  const bool ct = pl.domain == TimeDomain::continuous;
  const bool scalar = has_scalar_channel(pl);
  const bool square = pl.m() == pl.p();

  // Asymptotically stable agents are solvable in every variant.
  if (is_asymptotically_stable(pl.A, pl.domain)) {
    v.verdict = Verdict::solvable_by_sufficiency;
    v.conditions.push_back({"asymptotically_stable", true});
    if (problem == Problem::P4_no_bounds)
      v.cited_theorem = ct ? "Theorem 2" : "Theorem 5 (trivial case)";
    else
      v.cited_theorem = ct ? "Theorem 4" : "Theorem 7";
    return v;
  }

  const bool stab = pbh_stabilizable(pl);
  const bool det = pbh_detectable(pl);

  if (problem == Problem::P4_no_bounds && !ct) {
    v.verdict = Verdict::ruled_out_by_necessity;
    v.cited_theorem = "Theorem 5";
    v.conditions.push_back({"asymptotically_stable", false});
    return v;
  }

  if (problem == Problem::P4_no_bounds) {
    if (scalar) {
      const bool neutral = is_neutrally_stable(pl);
      const bool weak_mp = is_weakly_minimum_phase(pl);
      auto rd = relative_degree(pl);
      const bool rd1 = rd.has_value() && *rd == 1;
      v.conditions = {{"stabilizable", stab},
                      {"detectable", det},
                      {"neutrally_stable", neutral},
                      {"weakly_minimum_phase", weak_mp},
                      {"relative_degree_one", rd1}};
      if (!(stab && det && neutral && weak_mp && rd1)) {
        v.verdict = Verdict::ruled_out_by_necessity;
        v.cited_theorem = "Theorem 1";
        return v;
      }
      if (!square) {  // uniform-rank sufficiency undefined off-square
        v.verdict = Verdict::gap;
        v.cited_theorem = "Theorems 1/2";
        v.conditions.push_back({"uniform_rank_decidable", false});
        return v;
      }
      const bool mp = is_minimum_phase(pl);
      v.conditions.push_back({"minimum_phase", mp});
      v.verdict = mp ? Verdict::solvable_by_sufficiency : Verdict::gap;
      v.cited_theorem = mp ? "Theorem 2" : "Theorems 1/2";
      return v;
    }
    const bool closed = pole_location(pl.A, pl.domain) != PoleLocation::unstable;
    v.conditions = {{"stabilizable", stab}, {"detectable", det}, {"poles_in_closed_region", closed}};
    if (!(stab && det && closed)) {
      v.verdict = Verdict::ruled_out_by_necessity;
      v.cited_theorem = "Theorem 1";
      return v;
    }
    if (square) {
      const bool neutral = is_neutrally_stable(pl);
      const bool mp = is_minimum_phase(pl);
      auto rd = relative_degree(pl);
      const bool ur1 = rd.has_value() && *rd == 1;
      v.conditions.push_back({"neutrally_stable", neutral});
      v.conditions.push_back({"minimum_phase", mp});
      v.conditions.push_back({"uniform_rank_one", ur1});
      if (neutral && mp && ur1) {
        v.verdict = Verdict::solvable_by_sufficiency;
        v.cited_theorem = "Theorem 2";
        return v;
      }
    }
    v.verdict = Verdict::gap;
    v.cited_theorem = "Theorems 1/2";
    return v;
  }

  // P5 with local bounds.
  const std::string necessity = ct ? "Theorem 3" : "Theorem 6";
  const std::string sufficiency = ct ? "Theorem 4" : "Theorem 7";
  if (scalar) {
    const bool neutral = is_neutrally_stable(pl);
    v.conditions = {{"stabilizable", stab}, {"detectable", det}, {"neutrally_stable", neutral}};
    if (stab && det && neutral) {
      v.verdict = Verdict::solvable_by_sufficiency;
      v.cited_theorem = sufficiency;
    } else {
      v.verdict = Verdict::ruled_out_by_necessity;
      v.cited_theorem = necessity;
    }
    return v;
  }
  const bool closed = pole_location(pl.A, pl.domain) != PoleLocation::unstable;
  v.conditions = {{"stabilizable", stab}, {"detectable", det}, {"poles_in_closed_region", closed}};
  if (!(stab && det && closed)) {
    v.verdict = Verdict::ruled_out_by_necessity;
    v.cited_theorem = necessity;
    return v;
  }
  const bool neutral = is_neutrally_stable(pl);
  v.conditions.push_back({"neutrally_stable", neutral});
  if (neutral) {
    v.verdict = Verdict::solvable_by_sufficiency;
    v.cited_theorem = sufficiency;
  } else {
    v.verdict = Verdict::gap;
    v.cited_theorem = ct ? "Theorems 3/4" : "Theorems 6/7";
  }
  return v;
}

}  // namespace syncfree
