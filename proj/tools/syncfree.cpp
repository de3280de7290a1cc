#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "syncfree/harness.hpp"

namespace sf = syncfree;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;  // analysis/verification verdict negative

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SYNCFREE_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

void emit(const sf::Json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    sf::write_json(out_path, j);
}

// Accept either an inline object under `key` or a file path under `key_file`.
sf::Json resolve_section(const sf::Json& spec, const std::string& key) {
  if (spec.contains(key)) return spec.at(key);
  if (spec.contains(key + "_file")) return sf::load_json(spec.at(key + "_file").get<std::string>());
  throw sf::ParseError("spec needs '" + key + "' or '" + key + "_file'");
}

int cmd_analyze(const std::string& plant_path, const std::string& out_path) {
  sf::LTIPlant pl = sf::plant_from_json(sf::load_json(plant_path));
  sf::Json j{{"structural_report", sf::to_json(sf::structural_report(pl))},
             {"verdicts",
              sf::Json::array({sf::to_json(sf::classify(pl, sf::Problem::P4_no_bounds)),
                               sf::to_json(sf::classify(pl, sf::Problem::P5_with_bounds))})},
             {"tool_version", sf::kToolVersion}};
  emit(j, out_path);
  for (const auto& v : j["verdicts"])
    if (v["verdict"] == "ruled_out_by_necessity") return kExitNegative;
  return kExitOk;
}

int cmd_synthesize(const std::string& plant_path, std::string domain, const std::string& out_path,
                   const std::string& protocol_out, const std::string& certificate_out) {
  sf::LTIPlant pl = sf::plant_from_json(sf::load_json(plant_path));
  if (!domain.empty()) {
    if (domain == "ct")
      pl.domain = sf::TimeDomain::continuous;
    else if (domain == "dt")
      pl.domain = sf::TimeDomain::discrete;
    else
      throw sf::ParseError("--domain must be ct or dt");
  }
  auto [pr, cert] = pl.domain == sf::TimeDomain::continuous ? sf::synthesize_ct_with_bounds(pl)
                                                            : sf::synthesize_dt_with_bounds(pl);
  sf::Json j{{"protocol", sf::to_json(pr)},
             {"certificate", sf::to_json(cert)},
             {"plant", sf::to_json(pl)},
             {"tool_version", sf::kToolVersion}};
  emit(j, out_path);
  if (!protocol_out.empty()) sf::write_json(protocol_out, sf::to_json(pr));
  if (!certificate_out.empty()) sf::write_json(certificate_out, sf::to_json(cert));
  return kExitOk;
}

int cmd_verify(const std::string& plant_path, const std::string& protocol_path,
               const std::string& variant_str, const std::string& grid_path,
               const std::string& out_path, const std::string& csv_path) {
  sf::LTIPlant pl = sf::plant_from_json(sf::load_json(plant_path));
  sf::Protocol pr = sf::protocol_from_json(sf::load_json(protocol_path));
  sf::Variant variant = sf::parse_variant(variant_str);
  sf::GridSpec spec = grid_path.empty() ? sf::GridSpec::defaults(variant)
                                        : sf::gridspec_from_json(sf::load_json(grid_path));
  sf::GridReport rep = sf::grid_verify(pl, pr, variant, spec);
  emit(sf::to_json(rep), out_path);
  if (!csv_path.empty()) sf::write_text(csv_path, sf::grid_report_to_csv(rep));
  return rep.pass ? kExitOk : kExitNegative;
}

sf::NetworkConfig config_from_spec(const sf::Json& spec, std::uint64_t seed) {
  sf::LTIPlant pl = sf::plant_from_json(resolve_section(spec, "plant"));
  sf::Protocol pr = sf::protocol_from_json(resolve_section(spec, "protocol"));
  sf::WeightedDigraph g;
  if (spec.contains("generate")) {
    const auto& gen = spec.at("generate");
    g = sf::generate(sf::parse_graph_kind(gen.at("kind").get<std::string>()),
                     gen.at("n").get<int>(),
                     gen.contains("seed") ? gen.at("seed").get<std::uint64_t>() : seed,
                     gen.contains("weight_lo") ? gen.at("weight_lo").get<double>() : 0.5,
                     gen.contains("weight_hi") ? gen.at("weight_hi").get<double>() : 2.0);
  } else {
    g = sf::graph_from_json(resolve_section(spec, "graph"));
  }
  std::optional<sf::LocalBounds> bounds;
  if (pr.scaling == sf::Scaling::local_bounds) {
    if (spec.contains("bounds"))
      bounds = sf::bounds_from_json(spec.at("bounds"));
    else
      bounds = sf::bounds_from_in_degree(
          g, spec.contains("bounds_offset") ? spec.at("bounds_offset").get<double>() : 1.0);
  }
  double x0_scale = spec.contains("x0_scale") ? spec.at("x0_scale").get<double>() : 1e-3;
  sf::NetworkConfig cfg =
      sf::seeded_config(pl, pr, g, bounds, seed ^ 0xC0FFEEull, x0_scale);
  if (spec.contains("x0")) cfg.X0 = sf::matrix_from_json(spec.at("x0"), "x0");
  if (spec.contains("xc0")) cfg.Xc0 = sf::matrix_from_json(spec.at("xc0"), "xc0");
  return cfg;
}

sf::Json resolved_config_echo(const sf::NetworkConfig& cfg, double horizon, double h, double tol) {
  sf::Json j{{"plant", sf::to_json(cfg.plant)},
             {"protocol", sf::to_json(cfg.protocol)},
             {"graph", sf::to_json(cfg.graph)},
             {"x0", sf::matrix_to_json(cfg.X0)},
             {"xc0", sf::matrix_to_json(cfg.Xc0)},
             {"horizon", horizon},
             {"step", h},
             {"tol", tol},
             {"tool_version", sf::kToolVersion}};
  if (cfg.bounds) j["bounds"] = sf::to_json(*cfg.bounds);
  return j;
}

int cmd_simulate(const std::string& config_path, double horizon, double h, double tol,
                 const std::string& out_csv, std::uint64_t seed) {
  sf::Json spec = sf::load_json(config_path);
  sf::NetworkConfig cfg = config_from_spec(spec, seed);
  if (cfg.plant.domain == sf::TimeDomain::continuous && h <= 0.0)
    h = sf::auto_step(cfg, horizon);
  sf::Trace tr = sf::simulate(cfg, horizon, h);
  sf::SyncVerdict v = sf::verdict(tr, tol);
  sf::Json summary{{"verdict", sf::to_string(v)},
                   {"final_sync_error", tr.sync_error.back()},
                   {"samples", tr.times.size()},
                   {"tool_version", sf::kToolVersion}};
  std::cout << summary.dump(2) << "\n";
  if (!out_csv.empty()) {
    sf::write_text(out_csv, sf::trace_to_csv(tr, cfg));
    sf::write_json(out_csv + ".config.json", resolved_config_echo(cfg, horizon, h, tol));
  }
  return v == sf::SyncVerdict::not_synchronized ? kExitNegative : kExitOk;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_csv, std::uint64_t seed) {
  sf::Json spec = sf::load_json(spec_path);
  sf::LTIPlant pl = sf::plant_from_json(resolve_section(spec, "plant"));
  sf::Protocol pr;
  if (spec.contains("synthesize") && spec.at("synthesize").get<bool>()) {
    auto [p, cert] = pl.domain == sf::TimeDomain::continuous ? sf::synthesize_ct_with_bounds(pl)
                                                             : sf::synthesize_dt_with_bounds(pl);
    pr = p;
  } else {
    pr = sf::protocol_from_json(resolve_section(spec, "protocol"));
  }
  sf::SweepSettings st;
  if (spec.contains("graph_kind"))
    st.kind = sf::parse_graph_kind(spec.at("graph_kind").get<std::string>());
  if (spec.contains("weight_lo")) st.weight_lo = spec.at("weight_lo").get<double>();
  if (spec.contains("weight_hi")) st.weight_hi = spec.at("weight_hi").get<double>();
  if (spec.contains("bounds_offset")) st.bounds_offset = spec.at("bounds_offset").get<double>();
  if (spec.contains("tol")) st.tol = spec.at("tol").get<double>();
  if (spec.contains("t_max")) st.t_max = spec.at("t_max").get<double>();
  if (spec.contains("x0_scale")) st.x0_scale = spec.at("x0_scale").get<double>();
  if (spec.contains("h")) st.h = spec.at("h").get<double>();
  std::vector<int> sizes = spec.at("N").get<std::vector<int>>();
  if (sizes.empty()) throw sf::ParseError("sweep N list must be nonempty");
  for (size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw sf::ParseError("sweep N list must be increasing");
  std::vector<std::uint64_t> seeds =
      spec.contains("seeds") ? spec.at("seeds").get<std::vector<std::uint64_t>>()
                             : std::vector<std::uint64_t>{seed};

  std::vector<sf::SweepRow> rows;
  for (int n : sizes)
    for (std::uint64_t s : seeds) rows.push_back(sf::run_sweep_row(pl, pr, n, s, st));
  std::string csv = sf::sweep_to_csv(rows);
  if (out_csv.empty()) {
    std::cout << csv;
  } else {
    sf::write_text(out_csv, csv);
    sf::Json resolved{{"plant", sf::to_json(pl)},
                      {"protocol", sf::to_json(pr)},
                      {"graph_kind", sf::to_string(st.kind)},
                      {"weight_lo", st.weight_lo},
                      {"weight_hi", st.weight_hi},
                      {"bounds_offset", st.bounds_offset},
                      {"tol", st.tol},
                      {"t_max", st.t_max},
                      {"x0_scale", st.x0_scale},
                      {"h", st.h},
                      {"N", sizes},
                      {"seeds", seeds},
                      {"tool_version", sf::kToolVersion}};
    sf::write_json(out_csv + ".spec.json", resolved);
  }
  return kExitOk;
}

int cmd_reproduce(const std::string& case_name) {
  sf::CaseReport rep = sf::run_reproduce(case_name);
  for (const auto& c : rep.checks)
    std::cout << (c.pass ? "PASS" : "FAIL") << "  " << rep.name << "." << c.name
              << (c.detail.empty() ? "" : "  [" + c.detail + "]") << "\n";
  return rep.pass() ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for scale-free synchronization protocols over directed networks"};
  app.require_subcommand(1);
  std::uint64_t seed = default_seed();
  app.add_option("--seed", seed, "seed for generated graphs/initial conditions");

  auto* analyze = app.add_subcommand("analyze", "structural analysis and solvability verdicts");
  std::string plant_path, out_path;
  analyze->add_option("--plant", plant_path, "plant JSON file")->required();
  analyze->add_option("--out", out_path, "write the report to this file");

  auto* synth = app.add_subcommand("synthesize", "observer-based local-bounds protocol design");
  std::string synth_plant, synth_domain, synth_out, synth_protocol_out, synth_cert_out;
  synth->add_option("--plant", synth_plant)->required();
  synth->add_option("--domain", synth_domain, "ct or dt (defaults to the plant file's domain)");
  synth->add_option("--out", synth_out);
  synth->add_option("--protocol-out", synth_protocol_out);
  synth->add_option("--certificate-out", synth_cert_out);

  auto* verify = app.add_subcommand("verify", "stability grid over the quantified region");
  std::string v_plant, v_protocol, v_variant = "p4", v_grid, v_out, v_csv;
  verify->add_option("--plant", v_plant)->required();
  verify->add_option("--protocol", v_protocol)->required();
  verify->add_option("--variant", v_variant, "p4 or p5")->required();
  verify->add_option("--grid", v_grid, "grid spec JSON override");
  verify->add_option("--out", v_out);
  verify->add_option("--csv", v_csv, "per-sample (re, im, margin) CSV");

  auto* sim = app.add_subcommand("simulate", "full network simulation");
  std::string s_config, s_csv;
  double s_horizon = 50.0, s_h = 0.0, s_tol = 1e-6;
  sim->add_option("--config", s_config)->required();
  sim->add_option("-T,--horizon", s_horizon, "time horizon (steps for discrete plants)");
  sim->add_option("-h,--step", s_h, "integrator step (default: automatic)");
  sim->add_option("--tol", s_tol, "synchronization tolerance");
  sim->add_option("--out", s_csv, "trace CSV output");

  auto* sweep = app.add_subcommand("sweep", "scale sweep over graph sizes and seeds");
  std::string sw_spec, sw_out;
  sweep->add_option("--spec", sw_spec)->required();
  sweep->add_option("--out", sw_out, "CSV output (stdout otherwise)");

  auto* repro = app.add_subcommand("reproduce", "run a bundled golden scenario");
  std::string r_case;
  repro->add_option("case", r_case, "example1|example2|theorem4_pipeline|theorem5_falsify")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return cmd_analyze(plant_path, out_path);
    if (*synth)
      return cmd_synthesize(synth_plant, synth_domain, synth_out, synth_protocol_out,
                            synth_cert_out);
    if (*verify) return cmd_verify(v_plant, v_protocol, v_variant, v_grid, v_out, v_csv);
    if (*sim) return cmd_simulate(s_config, s_horizon, s_h, s_tol, s_csv, seed);
    if (*sweep) return cmd_sweep(sw_spec, sw_out, seed);
    if (*repro) return cmd_reproduce(r_case);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
