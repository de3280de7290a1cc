#pragma once

#include <optional>

#include "syncfree/graph.hpp"
#include "syncfree/protocol.hpp"

namespace syncfree {

// Full networked system: N copies of the agent, each driven by its protocol
// through the network signal zeta_i = sum_j l_ij y_j (optionally scaled by
// 1/(1+q_i)). Agent states are rows of X0, protocol states rows of Xc0.
struct NetworkConfig {
  LTIPlant plant;
  Protocol protocol;
  WeightedDigraph graph;
  std::optional<LocalBounds> bounds;
  MatrixXd X0;   // N x n
  MatrixXd Xc0;  // N x n_c

  int agents() const { return graph.n_agents; }

  void validate() const {
    plant.validate();
    protocol.validate_for(plant);
    graph.validate();
    if ((protocol.scaling == Scaling::local_bounds) != bounds.has_value())
      throw VariantMismatch("bounds must be present exactly when the protocol uses local scaling");
    if (bounds) {
      if (bounds->q.size() != graph.n_agents) throw DimensionMismatch("bounds length");
      for (int i = 0; i < graph.n_agents; ++i) {
        double din = graph.in_degree(i);
        if (!(bounds->q(i) > din)) throw BoundViolation(i, bounds->q(i), din);
      }
    }
    if (X0.rows() != graph.n_agents || X0.cols() != plant.n())
      throw DimensionMismatch("X0 must be N x n");
    if (Xc0.rows() != graph.n_agents || Xc0.cols() != protocol.nc())
      throw DimensionMismatch("Xc0 must be N x n_c");
  }
};

inline NetworkConfig seeded_config(const LTIPlant& pl, const Protocol& pr,
                                   const WeightedDigraph& g, std::optional<LocalBounds> bounds,
                                   std::uint64_t seed, double scale) {
  NetworkConfig cfg{pl, pr, g, std::move(bounds), MatrixXd(), MatrixXd()};
  Rng rng(seed);
  cfg.X0.resize(g.n_agents, pl.n());
  for (int i = 0; i < cfg.X0.rows(); ++i)
    for (int j = 0; j < cfg.X0.cols(); ++j) cfg.X0(i, j) = scale * rng.normal();
  cfg.Xc0 = MatrixXd::Zero(g.n_agents, pr.nc());
  return cfg;
}

struct Trace {
  std::vector<double> times;
  std::vector<MatrixXd> agent_states;     // each N x n
  std::vector<MatrixXd> protocol_states;  // each N x n_c
  std::vector<double> sync_error;         // max over pairs ||x_i - x_j||
  double step = 0.0;                      // integrator step (continuous)
};

inline double max_pair_error(const MatrixXd& x) {
  const int n = static_cast<int>(x.rows());
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) worst = std::max(worst, (x.row(i) - x.row(j)).norm());
  return worst;
}

inline double disagreement_norm(const MatrixXd& x) {
  Eigen::RowVectorXd mean = x.colwise().mean();
  return (x.rowwise() - mean).norm();
}

// Fixed-step RK4 on the stacked linear system (continuous) or exact iteration
// (discrete). The network action is evaluated as a Laplacian matrix product
// on the stacked outputs. To keep traces bounded, at most ~max_samples time
// points are stored (always including the endpoints).
inline Trace simulate(const NetworkConfig& cfg, double horizon, double h = 0.0,
                      int max_samples = 2001) {
  cfg.validate();
  const LTIPlant& pl = cfg.plant;
  const Protocol& pr = cfg.protocol;
  const int N = cfg.agents();
  MatrixXd l = build_laplacian(cfg.graph).entries;
  if (pr.scaling == Scaling::local_bounds)
    l = (1.0 / (1.0 + cfg.bounds->q.array())).matrix().asDiagonal() * l;

  // Row-stacked dynamics: rows of X are agent states, so each block acts by
  // its transpose from the right and the network couples through l * (X C').
  MatrixXd at = pl.A.transpose(), bt = pl.B.transpose(), ct = pl.C.transpose();
  MatrixXd act = pr.Ac.transpose(), bct = pr.Bc.transpose(), fct = pr.Fc.transpose(),
           dct = pr.Dc.transpose();

  Trace tr;
  MatrixXd x = cfg.X0, xc = cfg.Xc0;
  long steps;
  if (pl.domain == TimeDomain::continuous) {
    if (!(h > 0.0)) throw Error("continuous simulation requires a positive step");
    double linf_l = l.cwiseAbs().rowwise().sum().maxCoeff();
    auto linf = [](const MatrixXd& m) {
      return m.rows() ? m.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
    };
    double bound = std::max(linf(pl.A) + linf_l * linf(pl.B * pr.Dc * pl.C) +
                                linf(pl.B * pr.Fc),
                            linf(pr.Ac) + linf_l * linf(pr.Bc * pl.C));
    if (h * bound > 0.1 + 1e-12) throw StepGuardViolation(h, bound);
    steps = static_cast<long>(std::ceil(horizon / h - 1e-9));
    tr.step = h;
  } else {
    steps = static_cast<long>(horizon);
    tr.step = 1.0;
  }

  const long stride = std::max<long>(1, steps / std::max(1, max_samples - 1));
  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.agent_states.push_back(x);
    tr.protocol_states.push_back(xc);
    tr.sync_error.push_back(max_pair_error(x));
  };
  record(0.0);

  MatrixXd dx, dxc, x2, xc2, k1x, k1c, k2x, k2c, k3x, k3c, k4x, k4c;
  auto deriv = [&](const MatrixXd& xa, const MatrixXd& xca, MatrixXd& ox, MatrixXd& oxc) {
    MatrixXd z = l * (xa * ct);  // N x p, scaled network signal
    MatrixXd u = z * dct;        // N x m
    if (pr.nc() > 0) u += xca * fct;
    ox = xa * at + u * bt;
    if (pr.nc() > 0)
      oxc = xca * act + z * bct;
    else
      oxc = xca;
  };

  for (long i = 1; i <= steps; ++i) {
    if (pl.domain == TimeDomain::continuous) {
      deriv(x, xc, k1x, k1c);
      deriv(x + 0.5 * h * k1x, xc + 0.5 * h * k1c, k2x, k2c);
      deriv(x + 0.5 * h * k2x, xc + 0.5 * h * k2c, k3x, k3c);
      deriv(x + h * k3x, xc + h * k3c, k4x, k4c);
      x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      if (pr.nc() > 0) xc += (h / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
    } else {
      deriv(x, xc, dx, dxc);  // for the discrete map, "derivative" = next state
      x = dx;
      if (pr.nc() > 0) xc = dxc;
    }
    if (i % stride == 0 || i == steps)
      record(pl.domain == TimeDomain::continuous ? i * h : static_cast<double>(i));
  }
  return tr;
}

struct SyncSeries {
  std::vector<double> max_pair;
  std::vector<double> disagreement;
};

inline SyncSeries sync_error_series(const Trace& tr) {
  SyncSeries s;
  for (const auto& x : tr.agent_states) {
    s.max_pair.push_back(max_pair_error(x));
    s.disagreement.push_back(disagreement_norm(x));
  }
  return s;
}

enum class SyncVerdict { synchronized, not_synchronized, undecided };

inline std::string to_string(SyncVerdict v) {
  switch (v) {
    case SyncVerdict::synchronized: return "synchronized";
    case SyncVerdict::not_synchronized: return "not_synchronized";
    case SyncVerdict::undecided: return "undecided";
  }
  return "?";
}

// Windowed finite-horizon surrogate for the synchronization limit: the error
// must sit below tol throughout the final window without growing relative to
// the window before it; sustained error above 10 tol that is not shrinking
// reads as failure; everything else is undecided.
inline SyncVerdict verdict(const Trace& tr, double tol = 1e-6, int window = 0) {
  const int len = static_cast<int>(tr.sync_error.size());
  if (window <= 0) window = std::max(2, len / 10);
  if (window * 2 > len) window = len / 2;
  if (window < 1) return SyncVerdict::undecided;
  auto window_stats = [&](int lo, int hi) {
    double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
    for (int i = lo; i < hi; ++i) {
      mn = std::min(mn, tr.sync_error[i]);
      mx = std::max(mx, tr.sync_error[i]);
    }
    return std::pair<double, double>{mn, mx};
  };
  auto [min2, max2] = window_stats(len - window, len);
  auto [min1, max1] = window_stats(len - 2 * window, len - window);
  if (max2 < tol && max2 <= max1 + 1e-300) return SyncVerdict::synchronized;
  if (min2 > 10.0 * tol && max2 >= max1 * (1.0 - 1e-9)) return SyncVerdict::not_synchronized;
  return SyncVerdict::undecided;
}

}  // namespace syncfree
