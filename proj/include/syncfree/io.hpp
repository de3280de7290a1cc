#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "syncfree/closedloop.hpp"
#include "syncfree/sim.hpp"
#include "syncfree/synthesis.hpp"

namespace syncfree {

using Json = nlohmann::json;

inline Json matrix_to_json(const MatrixXd& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline MatrixXd matrix_from_json(const Json& j, const std::string& name) {
  if (!j.is_array()) throw ParseError(name + " must be an array of rows");
  const int rows = static_cast<int>(j.size());
  if (rows == 0) return MatrixXd(0, 0);
  const int cols = static_cast<int>(j.at(0).size());
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j.at(i).size()) != cols)
      throw ParseError(name + " row " + std::to_string(i) + " has inconsistent length");
    for (int c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  }
  return m;
}

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

// ---- plant ----

inline Json to_json(const LTIPlant& pl) {
  return Json{{"A", matrix_to_json(pl.A)},
              {"B", matrix_to_json(pl.B)},
              {"C", matrix_to_json(pl.C)},
              {"domain", to_string(pl.domain)}};
}

inline LTIPlant plant_from_json(const Json& j) {
  LTIPlant pl;
  pl.A = matrix_from_json(j.at("A"), "A");
  pl.B = matrix_from_json(j.at("B"), "B");
  pl.C = matrix_from_json(j.at("C"), "C");
  std::string d = j.at("domain").get<std::string>();
  if (d == "continuous")
    pl.domain = TimeDomain::continuous;
  else if (d == "discrete")
    pl.domain = TimeDomain::discrete;
  else
    throw ParseError("domain must be 'continuous' or 'discrete'");
  pl.validate();
  return pl;
}

// ---- graph: { "n": int, "edges": [[from, to, weight], ...] } ----

inline Json to_json(const WeightedDigraph& g) {
  Json edges = Json::array();
  for (int from = 0; from < g.n_agents; ++from)
    for (int to = 0; to < g.n_agents; ++to)
      if (g.weights(to, from) > 0.0) edges.push_back(Json::array({from, to, g.weights(to, from)}));
  return Json{{"n", g.n_agents}, {"edges", std::move(edges)}};
}

inline WeightedDigraph graph_from_json(const Json& j) {
  WeightedDigraph g;
  g.n_agents = j.at("n").get<int>();
  if (g.n_agents < 1) throw ParseError("graph size must be >= 1");
  g.weights = MatrixXd::Zero(g.n_agents, g.n_agents);
  for (const auto& e : j.at("edges")) {
    if (e.size() != 3) throw ParseError("edge entries must be [from, to, weight]");
    int from = e.at(0).get<int>(), to = e.at(1).get<int>();
    if (from < 0 || from >= g.n_agents || to < 0 || to >= g.n_agents)
      throw ParseError("edge endpoint out of range");
    g.weights(to, from) = e.at(2).get<double>();
  }
  g.validate();
  return g;
}

// ---- protocol ----

inline Json to_json(const Protocol& pr) {
  return Json{{"Ac", matrix_to_json(pr.Ac)}, {"Bc", matrix_to_json(pr.Bc)},
              {"Fc", matrix_to_json(pr.Fc)}, {"Dc", matrix_to_json(pr.Dc)},
              {"scaling", to_string(pr.scaling)}};
}

inline Protocol protocol_from_json(const Json& j) {
  Protocol pr;
  pr.Dc = matrix_from_json(j.at("Dc"), "Dc");
  const int m = static_cast<int>(pr.Dc.rows());
  const int p = static_cast<int>(pr.Dc.cols());
  pr.Ac = matrix_from_json(j.at("Ac"), "Ac");
  const int nc = static_cast<int>(pr.Ac.rows());
  pr.Bc = matrix_from_json(j.at("Bc"), "Bc");
  pr.Fc = matrix_from_json(j.at("Fc"), "Fc");
  if (nc == 0) {  // normalize empty shapes
    pr.Bc = MatrixXd::Zero(0, p);
    pr.Fc = MatrixXd::Zero(m, 0);
  }
  pr.scaling = parse_scaling(j.at("scaling").get<std::string>());
  return pr;
}

// ---- bounds ----

inline Json to_json(const LocalBounds& b) {
  Json q = Json::array();
  for (int i = 0; i < b.q.size(); ++i) q.push_back(b.q(i));
  return Json{{"q", std::move(q)}};
}

inline LocalBounds bounds_from_json(const Json& j) {
  LocalBounds b;
  const auto& q = j.at("q");
  b.q.resize(q.size());
  for (size_t i = 0; i < q.size(); ++i) b.q(static_cast<int>(i)) = q.at(i).get<double>();
  return b;
}

// ---- analysis structures ----

inline Json to_json(const StructuralReport& r) {
  Json zeros = Json::array();
  for (const auto& z : r.invariant_zeros) zeros.push_back(complex_to_json(z));
  Json j{{"stabilizable", r.stabilizable},
         {"detectable", r.detectable},
         {"pole_location", to_string(r.poles)},
         {"neutrally_stable", r.neutrally_stable},
         {"invariant_zeros", std::move(zeros)},
         {"minimum_phase", r.minimum_phase},
         {"io_shape", to_string(r.shape)}};
  j["weakly_minimum_phase"] = r.weakly_minimum_phase ? Json(*r.weakly_minimum_phase) : Json();
  j["relative_degree"] = r.relative_degree ? Json(*r.relative_degree) : Json();
  return j;
}

inline Json to_json(const SolvabilityVerdict& v) {
  Json conds = Json::array();
  for (const auto& c : v.conditions) conds.push_back(Json{{"name", c.name}, {"passed", c.passed}});
  return Json{{"problem", to_string(v.problem)},
              {"domain", to_string(v.domain)},
              {"verdict", to_string(v.verdict)},
              {"cited_theorem", v.cited_theorem},
              {"failed_or_passed_conditions", std::move(conds)}};
}

// ---- certificate ----

inline Json to_json(const SynthesisCertificate& c) {
  Json j{{"P", matrix_to_json(c.P)},
         {"Q", matrix_to_json(c.Q)},
         {"H", matrix_to_json(c.H)},
         {"epsilon", c.epsilon},
         {"delta", c.delta},
         {"residual_neutral", c.residual_neutral},
         {"residual_lyap", c.residual_lyap},
         {"margin_boun", c.margin_boun},
         {"margin_small", c.margin_small}};
  if (c.grid_margin) j["grid_margin"] = *c.grid_margin;
  return j;
}

// ---- grid ----

inline Json to_json(const GridSpec& s) {
  Json j{{"variant", to_string(s.variant)}, {"threshold", s.threshold}};
  if (!s.explicit_lambdas.empty()) {
    Json lam = Json::array();
    for (const auto& z : s.explicit_lambdas) lam.push_back(complex_to_json(z));
    j["explicit_lambdas"] = std::move(lam);
    return j;
  }
  if (s.variant == Variant::P4) {
    j["r_min"] = s.r_min;
    j["r_max"] = s.r_max;
    j["n_r"] = s.n_r;
    j["n_theta"] = s.n_theta_p4;
    j["theta_margin"] = s.theta_margin;
  } else {
    j["rho_max"] = s.rho_max;
    j["n_rho"] = s.n_rho;
    j["n_theta"] = s.n_theta_p5;
    j["near_one_ks"] = s.near_one_ks;
  }
  return j;
}

inline GridSpec gridspec_from_json(const Json& j) {
  GridSpec s;
  s.variant = parse_variant(j.at("variant").get<std::string>());
  if (j.contains("threshold")) s.threshold = j.at("threshold").get<double>();
  if (j.contains("explicit_lambdas")) {
    for (const auto& z : j.at("explicit_lambdas"))
      s.explicit_lambdas.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    return s;
  }
  if (j.contains("r_min")) s.r_min = j.at("r_min").get<double>();
  if (j.contains("r_max")) s.r_max = j.at("r_max").get<double>();
  if (j.contains("n_r")) s.n_r = j.at("n_r").get<int>();
  if (j.contains("theta_margin")) s.theta_margin = j.at("theta_margin").get<double>();
  if (j.contains("rho_max")) s.rho_max = j.at("rho_max").get<double>();
  if (j.contains("n_rho")) s.n_rho = j.at("n_rho").get<int>();
  if (j.contains("n_theta")) {
    if (s.variant == Variant::P4)
      s.n_theta_p4 = j.at("n_theta").get<int>();
    else
      s.n_theta_p5 = j.at("n_theta").get<int>();
  }
  if (j.contains("near_one_ks")) s.near_one_ks = j.at("near_one_ks").get<std::vector<int>>();
  return s;
}

inline Json to_json(const GridReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples) {
    Json js{{"lambda", complex_to_json(s.lambda)},
            {"margin", s.margin},
            {"normalized_margin", s.normalized_margin}};
    if (!s.error.empty()) js["error"] = s.error;
    samples.push_back(std::move(js));
  }
  Json j{{"variant", to_string(r.variant)},
         {"domain", to_string(r.domain)},
         {"grid", to_json(r.spec)},
         {"samples", std::move(samples)},
         {"worst_margin", r.worst_margin},
         {"pass", r.pass},
         {"tool_version", kToolVersion}};
  if (r.high_gain_margin_monotone) j["high_gain_margin_monotone"] = *r.high_gain_margin_monotone;
  return j;
}

// ---- CSV emitters (17 significant digits) ----

inline std::string matrix_to_csv(const MatrixXd& m) {
  std::ostringstream out;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << fmt17(m(i, j));
    }
    out << '\n';
  }
  return out.str();
}

inline std::string grid_report_to_csv(const GridReport& r) {
  std::ostringstream out;
  out << "re_lambda,im_lambda,margin\n";
  for (const auto& s : r.samples)
    out << fmt17(s.lambda.real()) << ',' << fmt17(s.lambda.imag()) << ',' << fmt17(s.margin)
        << '\n';
  return out.str();
}

inline std::string trace_to_csv(const Trace& tr, const NetworkConfig& cfg) {
  std::ostringstream out;
  out << "time,agent";
  for (int j = 0; j < cfg.plant.n(); ++j) out << ",x" << j;
  for (int j = 0; j < cfg.protocol.nc(); ++j) out << ",xc" << j;
  out << ",sync_error\n";
  for (size_t t = 0; t < tr.times.size(); ++t) {
    for (int i = 0; i < cfg.agents(); ++i) {
      out << fmt17(tr.times[t]) << ',' << i;
      for (int j = 0; j < cfg.plant.n(); ++j) out << ',' << fmt17(tr.agent_states[t](i, j));
      for (int j = 0; j < cfg.protocol.nc(); ++j) out << ',' << fmt17(tr.protocol_states[t](i, j));
      out << ',' << fmt17(tr.sync_error[t]) << '\n';
    }
  }
  return out.str();
}

// ---- file helpers ----

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

inline void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace syncfree
