#pragma once

#include "syncfree/plant.hpp"

// Seeded generators shared by the unit tests and the acceptance suite.
namespace testgen {

using namespace syncfree;

inline MatrixXd random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

// Neutrally stable state matrix: boundary blocks (skew pairs / zeros for
// continuous time, rotations / +-1 for discrete) plus strictly stable blocks,
// conjugated by a well-conditioned random similarity.
inline MatrixXd random_neutrally_stable_A(Rng& rng, int n, TimeDomain dom, bool similarity) {
  MatrixXd a = MatrixXd::Zero(n, n);
  int i = 0;
  while (i < n) {
    double u = rng.uniform01();
    if (i + 1 < n && u < 0.45) {  // boundary pair
      double w = rng.uniform(0.2, 2.0);
      if (dom == TimeDomain::continuous) {
        a(i, i + 1) = w;
        a(i + 1, i) = -w;
      } else {
        a(i, i) = std::cos(w);
        a(i, i + 1) = -std::sin(w);
        a(i + 1, i) = std::sin(w);
        a(i + 1, i + 1) = std::cos(w);
      }
      i += 2;
    } else if (u < 0.70) {  // boundary singleton
      a(i, i) = dom == TimeDomain::continuous ? 0.0 : (rng.uniform01() < 0.5 ? 1.0 : -1.0);
      i += 1;
    } else {  // strictly stable singleton
      a(i, i) = dom == TimeDomain::continuous ? -rng.uniform(0.2, 2.0) : rng.uniform(-0.8, 0.8);
      i += 1;
    }
  }
  if (!similarity) return a;
  while (true) {
    MatrixXd t = MatrixXd::Identity(n, n) + random_matrix(rng, n, n, 0.25);
    if (condition_number(t) < 40.0) return t * a * t.inverse();
  }
}

inline LTIPlant random_neutrally_stable_plant(Rng& rng, int n_max, TimeDomain dom,
                                              bool similarity = true) {
  while (true) {
    int n = 2 + static_cast<int>(rng.below(n_max - 1));
    LTIPlant pl;
    pl.domain = dom;
    pl.A = random_neutrally_stable_A(rng, n, dom, similarity);
    pl.B = random_matrix(rng, n, 1 + static_cast<int>(rng.below(2)));
    pl.C = random_matrix(rng, 1 + static_cast<int>(rng.below(2)), n);
    if (!is_neutrally_stable(pl)) continue;  // boundary may blur under the similarity
    if (!pbh_stabilizable(pl) || !pbh_detectable(pl)) continue;
    return pl;
  }
}

// General random plant for the classifier suites: mixes stable, neutrally
// stable, and unstable state matrices with random input/output maps.
inline LTIPlant random_plant(Rng& rng, int n_max) {
  int n = 1 + static_cast<int>(rng.below(n_max));
  LTIPlant pl;
  pl.domain = rng.uniform01() < 0.5 ? TimeDomain::continuous : TimeDomain::discrete;
  double u = rng.uniform01();
  if (u < 0.35 && n >= 2) {
    pl.A = random_neutrally_stable_A(rng, n, pl.domain, true);
  } else {
    pl.A = random_matrix(rng, n, n);
    if (u < 0.7) {  // shift to strictly stable
      if (pl.domain == TimeDomain::continuous)
        pl.A -= (spectral_abscissa(pl.A) + rng.uniform(0.2, 1.0)) * MatrixXd::Identity(n, n);
      else
        pl.A *= rng.uniform(0.3, 0.9) / std::max(spectral_radius(pl.A), 1e-6);
    }
  }
  pl.B = random_matrix(rng, n, 1 + static_cast<int>(rng.below(2)));
  pl.C = random_matrix(rng, 1 + static_cast<int>(rng.below(2)), n);
  return pl;
}

inline bool is_minimal_siso(const LTIPlant& pl) {
  const int n = pl.n();
  MatrixXd ctrb(n, n), obsv(n, n);
  MatrixXd col = pl.B, row = pl.C;
  for (int k = 0; k < n; ++k) {
    ctrb.col(k) = col;
    obsv.row(k) = row;
    col = pl.A * col;
    row = row * pl.A;
  }
  return rank_svd(ctrb) == n && rank_svd(obsv) == n;
}

inline LTIPlant random_minimal_siso(Rng& rng, int n_max) {
  while (true) {
    int n = 1 + static_cast<int>(rng.below(n_max));
    LTIPlant pl;
    pl.domain = TimeDomain::continuous;
    pl.A = random_matrix(rng, n, n);
    pl.B = random_matrix(rng, n, 1);
    pl.C = random_matrix(rng, 1, n);
    if (is_minimal_siso(pl)) return pl;
  }
}

// Controllable canonical realization of num(s)/den(s), den monic of degree n
// given as {1, a_{n-1}, ..., a_0}-style descending coefficients.
inline LTIPlant siso_realization(const std::vector<double>& den,
                                 const std::vector<double>& num_padded) {
  const int n = static_cast<int>(den.size()) - 1;
  LTIPlant pl;
  pl.domain = TimeDomain::continuous;
  pl.A = MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) pl.A(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) pl.A(n - 1, j) = -den[den.size() - 1 - j];
  pl.B = MatrixXd::Zero(n, 1);
  pl.B(n - 1, 0) = 1.0;
  pl.C = MatrixXd::Zero(1, n);
  for (int j = 0; j < n; ++j) pl.C(0, j) = num_padded[num_padded.size() - 1 - j];
  return pl;
}

}  // namespace testgen
