#pragma once

#include "syncfree/io.hpp"

namespace syncfree {

// ---- bundled reference scenarios ----
// These are the built-in golden cases behind `reproduce <case>`. Names follow
// the CLI contract: example1, example2, theorem4_pipeline, theorem5_falsify.

// Unstable Jordan pair with full state coupling; u = -zeta synchronizes it
// even though it is not neutrally stable.
inline LTIPlant example1_plant() {
  LTIPlant pl;
  pl.A = MatrixXd{{0.0, 1.0}, {0.0, 0.0}};
  pl.B = MatrixXd::Identity(2, 2);
  pl.C = MatrixXd::Identity(2, 2);
  pl.domain = TimeDomain::continuous;
  return pl;
}

inline Protocol example1_protocol() {
  return Protocol::static_gain(-MatrixXd::Identity(2, 2), Scaling::none);
}

// Two-channel plant with an invariant zero at +1: channel (1,1) is an
// unstable minimum-phase integrator, channel (2,2) is stable non-minimum
// phase, and the partial static gain diag(-1, 0) still synchronizes.
inline LTIPlant example2_plant() {
  LTIPlant pl;
  pl.A = MatrixXd{{0.0, 0.0, 1.0}, {0.0, -1.0, 1.0}, {0.0, 0.0, -1.0}};
  pl.B = MatrixXd{{1.0, 0.0}, {0.0, 0.0}, {0.0, 1.0}};
  pl.C = MatrixXd{{1.0, 0.0, 0.0}, {0.0, 1.0, -0.5}};
  pl.domain = TimeDomain::continuous;
  return pl;
}

inline Protocol example2_protocol() {
  return Protocol::static_gain(MatrixXd{{-1.0, 0.0}, {0.0, 0.0}}, Scaling::none);
}

inline LTIPlant harmonic_oscillator_plant() {
  LTIPlant pl;
  pl.A = MatrixXd{{0.0, 1.0}, {-1.0, 0.0}};
  pl.B = MatrixXd{{0.0}, {1.0}};
  pl.C = MatrixXd{{1.0, 0.0}};
  pl.domain = TimeDomain::continuous;
  return pl;
}

inline LTIPlant rotation_agent_dt(double angle = 0.7) {
  LTIPlant pl;
  pl.A = MatrixXd{{std::cos(angle), -std::sin(angle)}, {std::sin(angle), std::cos(angle)}};
  pl.B = MatrixXd{{0.0}, {1.0}};
  pl.C = MatrixXd{{1.0, 0.0}};
  pl.domain = TimeDomain::discrete;
  return pl;
}

// Double integrator with full state coupling and a single input; the static
// row gain (k1, k2) stabilizes small cycles and loses stability as the cycle
// grows (scale fragility).
inline LTIPlant double_integrator_full_coupling() {
  LTIPlant pl;
  pl.A = MatrixXd{{0.0, 1.0}, {0.0, 0.0}};
  pl.B = MatrixXd{{0.0}, {1.0}};
  pl.C = MatrixXd::Identity(2, 2);
  pl.domain = TimeDomain::continuous;
  return pl;
}

inline Protocol fragile_gain_protocol() {
  return Protocol::static_gain(MatrixXd{{-1.0, -1.0}}, Scaling::none);
}

// Seeded corpus of discrete non-Schur plants with protocols whose modal
// characteristic polynomial depends on lambda; every entry must be falsified.
inline std::vector<std::pair<LTIPlant, Protocol>> falsifier_corpus(int count, std::uint64_t seed) {
  std::vector<std::pair<LTIPlant, Protocol>> corpus;
  Rng rng(seed);
  while (static_cast<int>(corpus.size()) < count) {
    int n = 1 + static_cast<int>(rng.below(4));
    int nc = static_cast<int>(rng.below(3));
    LTIPlant pl;
    pl.domain = TimeDomain::discrete;
    pl.A.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pl.A(i, j) = rng.normal();
    double rho = spectral_radius(pl.A);
    if (rho < 1e-6) continue;
    pl.A *= rng.uniform(1.02, 1.6) / rho;  // clearly non-Schur
    pl.B.resize(n, 1);
    pl.C.resize(1, n);
    for (int i = 0; i < n; ++i) {
      pl.B(i, 0) = rng.normal();
      pl.C(0, i) = rng.normal();
    }
    Protocol pr;
    pr.scaling = Scaling::none;
    pr.Ac.resize(nc, nc);
    pr.Bc.resize(nc, 1);
    pr.Fc.resize(1, nc);
    pr.Dc.resize(1, 1);
    for (int i = 0; i < nc; ++i) {
      pr.Fc(0, i) = 0.5 * rng.normal();
      pr.Bc(i, 0) = 0.5 * rng.normal();
      for (int j = 0; j < nc; ++j) pr.Ac(i, j) = 0.5 * rng.normal();
    }
    pr.Dc(0, 0) = 0.5 * rng.normal();
    if (charpoly_lambda_independent(pl, pr)) continue;
    corpus.emplace_back(std::move(pl), std::move(pr));
  }
  return corpus;
}

// ---- sweep plumbing ----

struct SweepRow {
  int n = 0;
  std::uint64_t seed = 0;
  double worst_margin = 0.0;
  SyncVerdict verdict = SyncVerdict::undecided;
  double final_sync_error = 0.0;
  std::string error;
};

struct SweepSettings {
  GraphKind kind = GraphKind::random_spanning_tree;
  double weight_lo = 0.5, weight_hi = 2.0;
  double bounds_offset = 1.0;  // q_i = d_in(i) + offset for scaled protocols
  double tol = 1e-6;
  double t_max = 1e5;
  double x0_scale = 1e-4;
  double h = 0.0;  // 0 = automatic
};

inline double auto_step(const NetworkConfig& cfg, double horizon) {
  MatrixXd l = build_laplacian(cfg.graph).entries;
  if (cfg.protocol.scaling == Scaling::local_bounds)
    l = (1.0 / (1.0 + cfg.bounds->q.array())).matrix().asDiagonal() * l;
  auto linf = [](const MatrixXd& m) {
    return m.rows() ? m.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  };
  double linf_l = linf(l);
  double bound = std::max(linf(cfg.plant.A) +
                              linf_l * linf(cfg.plant.B * cfg.protocol.Dc * cfg.plant.C) +
                              linf(cfg.plant.B * cfg.protocol.Fc),
                          linf(cfg.protocol.Ac) + linf_l * linf(cfg.protocol.Bc * cfg.plant.C));
  double h = std::min(0.01, horizon / 200.0);
  if (bound > 0.0) h = std::min(h, 0.0999 / bound);
  return h;
}

inline SweepRow run_sweep_row(const LTIPlant& pl, const Protocol& pr, int n, std::uint64_t seed,
                              const SweepSettings& st) {
  SweepRow row;
  row.n = n;
  row.seed = seed;
  try {
    WeightedDigraph g = generate(st.kind, n, seed, st.weight_lo, st.weight_hi);
    std::optional<LocalBounds> bounds;
    if (pr.scaling == Scaling::local_bounds) bounds = bounds_from_in_degree(g, st.bounds_offset);
    double margin = std::numeric_limits<double>::infinity();
    if (n > 1) {
      auto nm = network_margin(pl, pr, g, bounds);
      margin = nm.worst_margin;
    }
    row.worst_margin = margin;
    double horizon = margin > 1e-9 ? std::min(st.t_max, 10.0 / margin) : 100.0;
    if (!std::isfinite(horizon)) horizon = 100.0;  // single agent or empty spectrum
    NetworkConfig cfg = seeded_config(pl, pr, g, bounds, seed ^ 0xC0FFEEull, st.x0_scale);
    Trace tr;
    if (pl.domain == TimeDomain::continuous) {
      double h = st.h > 0.0 ? st.h : auto_step(cfg, horizon);
      tr = simulate(cfg, horizon, h);
    } else {
      tr = simulate(cfg, std::max(200.0, horizon));
    }
    row.verdict = verdict(tr, st.tol);
    row.final_sync_error = tr.sync_error.back();
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "n,seed,verdict,worst_margin,final_sync_error,error\n";
  for (const auto& r : rows)
    out << r.n << ',' << r.seed << ',' << to_string(r.verdict) << ',' << fmt17(r.worst_margin)
        << ',' << fmt17(r.final_sync_error) << ',' << r.error << '\n';
  return out.str();
}

// ---- reproduce cases ----

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CaseReport {
  std::string name;
  std::vector<CheckResult> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline void add_check(CaseReport& rep, const std::string& name, bool pass,
                      const std::string& detail = "") {
  rep.checks.push_back({name, pass, detail});
}

inline CaseReport reproduce_example1() {
  CaseReport rep{"example1", {}};
  LTIPlant pl = example1_plant();
  Protocol pr = example1_protocol();
  GridReport grid = grid_verify(pl, pr, Variant::P4);
  add_check(rep, "grid_p4_pass", grid.pass, "worst_margin=" + fmt17(grid.worst_margin));
  const int sizes[3] = {5, 20, 100};
  const std::uint64_t seeds[3] = {11, 12, 13};
  for (int k = 0; k < 3; ++k) {
    WeightedDigraph g = generate(GraphKind::random_spanning_tree, sizes[k], seeds[k], 0.5, 2.0);
    auto nm = network_margin(pl, pr, g, std::nullopt);
    double horizon = 10.0 / nm.worst_margin;
    NetworkConfig cfg = seeded_config(pl, pr, g, std::nullopt, seeds[k] ^ 0xC0FFEEull, 1e-4);
    Trace tr = simulate(cfg, horizon, auto_step(cfg, horizon));
    double err = tr.sync_error.back();
    add_check(rep, "sync_below_1e-6_N" + std::to_string(sizes[k]), err < 1e-6,
              "final=" + fmt17(err) + " margin=" + fmt17(nm.worst_margin));
  }
  return rep;
}

inline CaseReport reproduce_example2() {
  CaseReport rep{"example2", {}};
  LTIPlant pl = example2_plant();
  auto zeros = invariant_zeros(pl);
  bool zero_at_one = false;
  std::string zs;
  for (const auto& z : zeros) {
    zs += "(" + fmt17(z.real()) + "," + fmt17(z.imag()) + ") ";
    if (std::abs(z - Complex(1.0)) <= 1e-6) zero_at_one = true;
  }
  add_check(rep, "invariant_zero_at_1", zero_at_one, "zeros: " + zs);
  GridReport grid = grid_verify(pl, example2_protocol(), Variant::P4);
  add_check(rep, "grid_p4_pass", grid.pass, "worst_margin=" + fmt17(grid.worst_margin));
  return rep;
}

inline CaseReport reproduce_theorem4_pipeline() {
  CaseReport rep{"theorem4_pipeline", {}};
  LTIPlant pl = harmonic_oscillator_plant();
  auto [pr, cert] = synthesize_ct_with_bounds(pl);
  add_check(rep, "residual_neutral", cert.residual_neutral <= 1e-8,
            fmt17(cert.residual_neutral));
  add_check(rep, "residual_lyap", cert.residual_lyap <= 1e-8, fmt17(cert.residual_lyap));
  add_check(rep, "margin_boun", cert.margin_boun >= 0.0, fmt17(cert.margin_boun));
  add_check(rep, "margin_small", cert.margin_small > 0.0, fmt17(cert.margin_small));
  GridReport grid = grid_verify(pl, pr, Variant::P5);
  add_check(rep, "grid_p5_pass", grid.pass, "worst_margin=" + fmt17(grid.worst_margin));
  WeightedDigraph g = generate(GraphKind::random_spanning_tree, 50, 7, 0.5, 2.0);
  LocalBounds bounds = bounds_from_in_degree(g, 1.0);
  auto nm = network_margin(pl, pr, g, bounds);
  double horizon = 10.0 / nm.worst_margin;
  NetworkConfig cfg = seeded_config(pl, pr, g, bounds, 0xC0FFEEull, 1e-4);
  Trace tr = simulate(cfg, horizon, auto_step(cfg, horizon));
  add_check(rep, "sync_below_1e-6_N50", tr.sync_error.back() < 1e-6,
            "final=" + fmt17(tr.sync_error.back()) + " margin=" + fmt17(nm.worst_margin));
  return rep;
}

inline CaseReport reproduce_theorem5_falsify() {
  CaseReport rep{"theorem5_falsify", {}};
  auto corpus = falsifier_corpus(30, 0xFA151F1);
  int found = 0;
  for (const auto& [pl, pr] : corpus)
    if (falsify_dt_no_bounds(pl, pr).found) ++found;
  add_check(rep, "lambda_star_found_30_of_30", found == static_cast<int>(corpus.size()),
            std::to_string(found) + "/30");
  LTIPlant stable = rotation_agent_dt(0.5);
  stable.A *= 0.5;
  auto res = falsify_dt_no_bounds(stable, Protocol::zero(stable, Scaling::none));
  add_check(rep, "schur_zero_protocol_trivial", !res.found && res.trivial_case);
  return rep;
}

inline CaseReport run_reproduce(const std::string& case_name) {
  if (case_name == "example1") return reproduce_example1();
  if (case_name == "example2") return reproduce_example2();
  if (case_name == "theorem4_pipeline") return reproduce_theorem4_pipeline();
  if (case_name == "theorem5_falsify") return reproduce_theorem5_falsify();
  throw ParseError("unknown reproduce case '" + case_name +
                   "' (expected example1|example2|theorem4_pipeline|theorem5_falsify)");
}

}  // namespace syncfree
