#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <string>

#include <CLI11.hpp>

#include "schrocon/config.hpp"
#include "schrocon/nls_control.hpp"
#include "schrocon/resolvent.hpp"
#include "schrocon/tensor.hpp"

namespace schrocon {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitUnknownSubcommand = 64;

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"simulate",     "control",   "observability", "resolvent-sweep",
                                          "tensor-check", "stabilize", "global-control"};
  return s;
}

inline Json versions() {
  return Json{{"schrocon", kVersion},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"cli11", CLI11_VERSION}};
}

/// Structured form of a numerical failure.
inline Json error_to_json(const NumericalError& e) {
  Json j{{"kind", e.kind()}, {"message", e.what()}};
  if (auto* nc = dynamic_cast<const NonConvergence*>(&e)) {
    j["iterations"] = nc->iterations();
    j["residual"] = nc->residual();
  } else if (auto* inf = dynamic_cast<const Infeasible*>(&e)) {
    j["lambda"] = inf->lambda();
  } else if (auto* ic = dynamic_cast<const IllConditioned*>(&e)) {
    j["lambda_min"] = ic->lambda_min();
  } else if (auto* dv = dynamic_cast<const Divergence*>(&e)) {
    j["last_ratio"] = std::isfinite(dv->last_ratio()) ? Json(dv->last_ratio()) : Json(nullptr);
  } else if (auto* ss = dynamic_cast<const StabilizationStall*>(&e)) {
    j["gamma"] = ss->gamma();
  }
  return j;
}

struct RunOutput {
  int exit_code = kExitOk;
  Json report;
  /// CSV artifacts by file stem.
  std::map<std::string, CsvTable> tables;
};

namespace detail {

inline SolverOptions solver_options(const ExperimentConfig& c) {
  return SolverOptions{c.solver_tol, c.solver_max_iter, c.solver_preconditioner};
}

inline EigenMethod eigen_method(const ExperimentConfig& c) {
  if (c.eigen_method == "dense") return EigenMethod::dense;
  if (c.eigen_method == "lanczos") return EigenMethod::lanczos;
  return EigenMethod::automatic;
}

inline CsvTable drive_table(const DriveResult& d) {
  return CsvTable{{"t", "mass", "observed_mass"}, {d.times, d.mass, d.observed}};
}

inline Json run_simulate(const ExperimentConfig& c, std::mt19937_64& rng, RunOutput& out) {
  const FourierState u0 = c.initial_state.build(c.grid(), rng);
  if (c.simulate_model == "nls") {
    NLSParams p{c.sigma, std::nullopt, c.dt, c.dealias, 1.0};
    if (c.damping) p.damping = c.window();
    const int steps = static_cast<int>(std::ceil(c.horizon / c.dt - 1e-9));
    const int stride = std::max(1, steps / std::max(1, c.record_points - 1));
    const EvolveResult r = evolve(u0, c.horizon, p, stride);
    out.tables["simulate"] = record_table(r.record);
    return Json{{"model", "nls"},
                {"steps", r.steps},
                {"mass_initial", r.record.mass.front()},
                {"mass_final", r.record.mass.back()},
                {"energy_initial", r.record.energy.front()},
                {"energy_final", r.record.energy.back()}};
  }
  const Gramian G(c.gramian_spec(c.horizon));
  FourierState phi0 = FourierState::zeros(c.grid());
  Json extra = Json::object();
  if (c.simulate_control) {
    const ControlSolution sol = solve_hum(G, u0, solver_options(c));
    phi0 = sol.phi0;
    extra["iterations"] = sol.iterations;
  }
  const DriveResult d = drive_linear(u0, G, phi0, c.record_points);
  out.tables["simulate"] = drive_table(d);
  Json r{{"model", "linear"},
         {"controlled", c.simulate_control},
         {"n_quad", static_cast<int>(G.quadrature().size())},
         {"mass_initial", d.mass.front()},
         {"mass_final", d.mass.back()},
         {"residual", d.residual}};
  r.update(extra);
  return r;
}

inline Json run_control(const ExperimentConfig& c, std::mt19937_64& rng, RunOutput& out) {
  const FourierState u0 = c.initial_state.build(c.grid(), rng);
  const Gramian G(c.gramian_spec(c.horizon));
  if (c.control_model == "nls") {
    LocalControlOptions lo;
    lo.dt = c.dt;
    lo.solver = SolverOptions{std::min(c.solver_tol, 1e-12), c.solver_max_iter, c.solver_preconditioner};
    const LocalControlResult r = local_control_nls(u0, G, c.sigma, c.picard_tol, c.picard_max_iter, lo);
    CsvTable t{{"iteration", "iterate_difference"}, {{}, {}}};
    for (std::size_t i = 0; i < r.history.size(); ++i) {
      t.columns[0].push_back(static_cast<double>(i + 1));
      t.columns[1].push_back(r.history[i]);
    }
    out.tables["control"] = t;
    return Json{{"model", "nls"},
                {"n_quad", static_cast<int>(G.quadrature().size())},
                {"residual", r.residual},
                {"relative_residual", u0.l2_norm() > 0 ? r.residual / u0.l2_norm() : 0.0},
                {"iterations", r.iterations},
                {"contraction_ratio", std::isfinite(r.contraction_ratio) ? Json(r.contraction_ratio) : Json(nullptr)},
                {"certified", r.certified},
                {"phi0", state_to_json(r.phi0)}};
  }
  const ControlSolution sol = solve_hum(G, u0, solver_options(c));
  const DriveResult d = drive_linear(u0, G, sol.phi0, c.record_points);
  out.tables["control"] = drive_table(d);
  return Json{{"model", "linear"},
              {"n_quad", static_cast<int>(G.quadrature().size())},
              {"residual", sol.residual_l2},
              {"relative_residual", u0.l2_norm() > 0 ? sol.residual_l2 / u0.l2_norm() : 0.0},
              {"iterations", sol.iterations},
              {"solver_residual", sol.solver_residual},
              {"phi0", state_to_json(sol.phi0)}};
}

inline Json run_observability(const ExperimentConfig& c, std::mt19937_64& rng, RunOutput& out) {
  double T = c.horizon;
  Json miller = nullptr;
  double M_sup = 0.0, m = 0.0;
  if (!c.sweep_report.empty()) {
    std::ifstream in(c.sweep_report);
    if (!in) throw ConfigError("config.observability.sweep_report", "cannot open " + c.sweep_report);
    Json rep;
    try {
      rep = Json::parse(in);
      M_sup = rep.at("results").at("M_sup").get<double>();
      m = rep.at("results").at("m").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config.observability.sweep_report", std::string("not a resolvent-sweep report: ") + e.what());
    }
    T = c.time_factor * std::numbers::pi * std::sqrt(M_sup);
    if (!(T > 0.0)) throw ConfigError("config.observability.sweep_report", "M_sup = 0 gives no Miller time");
  }
  const Gramian G(c.gramian_spec(T));
  const ObservabilityResult r = observability_constant(G, eigen_method(c));
  Json res{{"C_T", r.C_T}, {"lambda_min", r.lambda_min}, {"n_quad", r.n_quad}, {"T", T}, {"method", r.method}};
  if (!c.sweep_report.empty()) {
    const double bound = miller_cost_bound(M_sup, m, T);
    miller = Json{{"M_sup", M_sup},
                  {"m", m},
                  {"miller_time", std::numbers::pi * std::sqrt(M_sup)},
                  {"T", T},
                  {"cost_bound", bound},
                  {"slack", c.cost_slack},
                  {"cross_check", r.C_T <= c.cost_slack * bound}};
    res["miller"] = miller;
  }
  if (c.regularity_s) {
    const RegularityStats st = hum_regularity_ratio(G, *c.regularity_s, c.regularity_samples, rng, solver_options(c));
    res["regularity"] = Json{{"s", st.s}, {"n_samples", st.n_samples}, {"max", st.max_ratio}, {"mean", st.mean_ratio}};
  }
  out.tables["observability"] = CsvTable{{"T", "C_T", "lambda_min", "n_quad"}, {{T}, {r.C_T}, {r.lambda_min}, {double(r.n_quad)}}};
  return res;
}

inline Json run_sweep(const ExperimentConfig& c, RunOutput& out) {
  const GridSpec g = c.grid();
  const CutoffWindow w = c.window();
  const auto [dlo, dhi] = default_lambda_range(g);
  const double lo = c.lambda_min.value_or(dlo), hi = c.lambda_max.value_or(dhi);
  const double m_min = minimal_feasible_m(w);
  const double m = c.m.value_or(c.m_factor * m_min);
  SweepOptions so;
  so.skip_infeasible = c.skip_infeasible;
  const ResolventSweepResult r =
      c.adaptive ? adaptive_sweep(g, w, m, lo, hi, c.n_points, 0.05, 4, so)
                 : sweep(c.n_points == 1 ? std::vector<double>{lo} : default_lambda_grid(g, lo, hi, c.n_points), m, w,
                         g, so);
  CsvTable t{{"lambda", "M_best", "feasible"}, {r.lambda_grid, {}, {}}};
  for (std::size_t i = 0; i < r.lambda_grid.size(); ++i) {
    t.columns[1].push_back(r.M_of_lambda[i]);
    t.columns[2].push_back(r.feasible[i] ? 1.0 : 0.0);
  }
  out.tables["resolvent-sweep"] = t;
  Json res{{"m", m},
           {"m_min_feasible", m_min},
           {"M_sup", r.M_sup},
           {"lambda_at_sup", r.lambda_at_sup},
           {"miller_time", r.miller_time},
           {"grid_spec", {{"lambda_min", lo}, {"lambda_max", hi}, {"n_points", r.lambda_grid.size()}, {"adaptive", c.adaptive}}},
           {"refinement_history", r.refinement_history}};
  if (c.high_frequency_R0) res["high_frequency"] = Json{{"R0", *c.high_frequency_R0}, {"M_sup", r.restricted_sup(*c.high_frequency_R0)}};
  return res;
}

inline Json run_tensor(const ExperimentConfig& c, RunOutput& out) {
  ExperimentConfig c1 = c;
  c1.dim = 1;
  const StripWindow sw = make_strip_window(c1.window());
  const GramianSpec spec = make_gramian_spec(c.horizon, sw.window, c.n_quad, c.quad_rule);
  TensorReport r;
  if (c.tensor_method == "auto") r = strip_observability_constant(spec);
  else
    r = strip_observability_constant(spec, c.tensor_method == "dense_full"     ? StripMethod::dense_full
                                           : c.tensor_method == "dense_blocks" ? StripMethod::dense_blocks
                                                                               : StripMethod::krylov);
  out.tables["tensor-check"] = CsvTable{{"N_per_axis", "T", "C_1d", "C_2d", "relative_gap"},
                                        {{double(r.N_per_axis)}, {r.T}, {r.C_1d}, {r.C_2d}, {r.relative_gap}}};
  return Json{{"C_1d", r.C_1d}, {"C_2d", r.C_2d}, {"relative_gap", r.relative_gap},
              {"N_per_axis", r.N_per_axis}, {"T", r.T}, {"method", r.method}};
}

inline Json run_stabilize(const ExperimentConfig& c, std::mt19937_64& rng, RunOutput& out) {
  const FourierState u0 = c.initial_state.build(c.grid(), rng);
  NLSParams p{c.sigma, c.window(), c.dt, c.dealias, 1.0};
  StabilizeOptions so;
  so.chunk = c.chunk;
  so.cap_factor = c.cap_factor;
  const double threshold = c.stabilize_fraction * u0.l2_norm();
  if (!(threshold > 0.0)) throw ConfigError("config.initial_state.norm", "stabilize needs a nonzero initial state");
  const StabilizeResult r = stabilize(u0, p, threshold, so);
  out.tables["stabilize"] = record_table(r.record);
  return Json{{"gamma", r.gamma_est},
              {"time", r.time},
              {"steps", r.steps},
              {"horizon_cap", std::isfinite(r.horizon_cap) ? Json(r.horizon_cap) : Json(nullptr)},
              {"norm_initial", u0.l2_norm()},
              {"norm_final", r.final_state.l2_norm()},
              {"threshold", threshold}};
}

inline Json run_global(const ExperimentConfig& c, std::mt19937_64& rng, RunOutput& out) {
  const FourierState u0 = c.initial_state.build(c.grid(), rng);
  const FourierState u1 = c.target_state.build(c.grid(), rng);
  const Gramian G(c.gramian_spec(c.horizon));
  GlobalControlOptions o;
  o.dt = c.dt;
  o.local.dt = c.dt;
  o.stabilize.chunk = c.chunk;
  o.stabilize.cap_factor = c.cap_factor;
  o.max_iter = c.picard_max_iter;
  const ControlSchedule s = global_control(u0, u1, G, c.sigma, c.window(), c.global_threshold, c.picard_tol, o);
  Json phases = Json::array();
  CsvTable t{{"phase", "t_start", "t_end", "is_control"}, {{}, {}, {}, {}}};
  for (std::size_t i = 0; i < s.phases.size(); ++i) {
    const SchedulePhase& ph = s.phases[i];
    Json j{{"phase", ph.name},
           {"t_start", ph.t_start},
           {"t_end", ph.t_end},
           {"type", to_string(ph.type)}};
    if (ph.type == PhaseType::damped) {
      j["steps"] = ph.steps;
      j["dt"] = ph.dt;
      j["damping_sign"] = ph.damping_sign;
      j["phi0"] = nullptr;
    } else {
      j["reversed_conjugate"] = ph.reversed_conjugate;
      j["phi0"] = state_to_json(*ph.phi0);
    }
    phases.push_back(j);
    t.columns[0].push_back(static_cast<double>(i));
    t.columns[1].push_back(ph.t_start);
    t.columns[2].push_back(ph.t_end);
    t.columns[3].push_back(ph.type == PhaseType::control ? 1.0 : 0.0);
  }
  out.tables["global-control"] = t;
  return Json{{"forward_error", s.forward_error},
              {"reverse_error", s.reverse_error},
              {"total_time", s.total_time},
              {"threshold", c.global_threshold},
              {"phases", phases}};
}

}  // namespace detail

/// Runs one subcommand on an already validated configuration. Numerical
/// failures become exit code 3 with the structured error in the report.
inline RunOutput run(const std::string& subcommand, const ExperimentConfig& c) {
  RunOutput out;
  out.report = Json{{"subcommand", subcommand}, {"config_echo", config_to_json(c)}, {"versions", versions()}};
  std::mt19937_64 rng(c.seed);
  try {
    Json res;
    if (subcommand == "simulate") res = detail::run_simulate(c, rng, out);
    else if (subcommand == "control") res = detail::run_control(c, rng, out);
    else if (subcommand == "observability") res = detail::run_observability(c, rng, out);
    else if (subcommand == "resolvent-sweep") res = detail::run_sweep(c, out);
    else if (subcommand == "tensor-check") res = detail::run_tensor(c, out);
    else if (subcommand == "stabilize") res = detail::run_stabilize(c, rng, out);
    else if (subcommand == "global-control") res = detail::run_global(c, rng, out);
    else {
      out.exit_code = kExitUnknownSubcommand;
      out.report["error"] = Json{{"kind", "unknown_subcommand"}, {"message", "unknown subcommand " + subcommand}};
      return out;
    }
    out.report["status"] = "ok";
    out.report["results"] = std::move(res);
  } catch (const NumericalError& e) {
    out.tables.clear();
    out.exit_code = kExitNumerical;
    out.report["status"] = "numerical_failure";
    out.report["results"] = nullptr;
    out.report["error"] = error_to_json(e);
  }
  return out;
}

/// Writes the JSON report and CSV tables selected by the configuration.
inline void write_artifacts(const RunOutput& r, const ExperimentConfig& c, const std::string& subcommand) {
  namespace fs = std::filesystem;
  fs::create_directories(c.out_dir);
  if (c.write_json) {
    std::ofstream os(fs::path(c.out_dir) / (subcommand + ".json"));
    os << r.report.dump(2) << "\n";
  }
  if (c.write_csv) {
    for (const auto& [stem, table] : r.tables) {
      std::ofstream os(fs::path(c.out_dir) / (stem + ".csv"));
      table.write(os);
    }
  }
}

/// Entry point shared by the executable and the tests. Returns the exit code.
inline int cli_main(int argc, const char* const* argv, std::ostream& log = std::cerr) {
  CLI::App app{"Spectral control laboratory for Schroedinger equations on the torus"};
  std::string subcommand, config_path, out_dir, format, sweep_report;
  std::optional<long long> seed;
  std::vector<std::string> sets;
  app.add_option("subcommand", subcommand, "simulate | control | observability | resolvent-sweep | tensor-check | stabilize | global-control")
      ->required();
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  app.add_option("--seed", seed, "Random seed (overrides seed)");
  app.add_option("--format", format, "csv | json | both")->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_option("--sweep-report", sweep_report, "resolvent-sweep JSON report for the Miller cross-check");
  app.add_option("--set", sets, "Override a config field: /json/pointer=JSON value");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e);
      return kExitOk;
    }
    if (!subcommand.empty() && std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end()) {
      log << "unknown subcommand: " << subcommand << "\n";
      return kExitUnknownSubcommand;
    }
    log << e.what() << "\n";
    return kExitValidation;
  }
  if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end()) {
    log << "unknown subcommand: " << subcommand << "\n";
    return kExitUnknownSubcommand;
  }

  ExperimentConfig cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("--config", "cannot open " + config_path);
    Json root;
    try {
      root = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || s.empty() || s[0] != '/') throw ConfigError("--set", "expected /path=value, got " + s);
      Json value;
      try {
        value = Json::parse(s.substr(eq + 1));
      } catch (const nlohmann::json::parse_error&) {
        value = s.substr(eq + 1);
      }
      try {
        root[Json::json_pointer(s.substr(0, eq))] = value;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("--set", e.what());
      }
    }
    if (seed) root["seed"] = *seed;
    if (!out_dir.empty()) root["output"]["dir"] = out_dir;
    if (!format.empty()) {
      root["output"]["formats"] = format == "both" ? Json::array({"json", "csv"}) : Json::array({format});
    }
    if (!sweep_report.empty()) root["observability"]["sweep_report"] = sweep_report;
    cfg = parse_config(root);
  } catch (const ValidationError& e) {
    log << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  }

  RunOutput r;
  try {
    r = run(subcommand, cfg);
  } catch (const ValidationError& e) {
    log << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  }
  write_artifacts(r, cfg, subcommand);
  if (r.exit_code == kExitNumerical) log << "numerical failure: " << r.report["error"]["message"].get<std::string>() << "\n";
  return r.exit_code;
}

}  // namespace schrocon
