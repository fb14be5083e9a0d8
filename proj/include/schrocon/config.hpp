#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "schrocon/io.hpp"
#include "schrocon/gramian.hpp"
#include "schrocon/random_state.hpp"
#include "schrocon/window.hpp"

namespace schrocon {

/// Malformed or invalid configuration; the message starts with the field path.
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& path, const std::string& what) : ValidationError(path + ": " + what) {}
};

namespace cfg {

inline const Json* field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline double number(const Json& obj, const std::string& path, const char* key, double def) {
  const Json* v = field(obj, key);
  if (!v) return def;
  if (!v->is_number()) throw ConfigError(path + "." + key, "expected a number");
  return v->get<double>();
}

inline std::optional<double> optional_number(const Json& obj, const std::string& path, const char* key) {
  const Json* v = field(obj, key);
  if (!v) return std::nullopt;
  if (!v->is_number()) throw ConfigError(path + "." + key, "expected a number or null");
  return v->get<double>();
}

inline long long integer(const Json& obj, const std::string& path, const char* key, long long def) {
  const Json* v = field(obj, key);
  if (!v) return def;
  if (!v->is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
  return v->get<long long>();
}

inline bool boolean(const Json& obj, const std::string& path, const char* key, bool def) {
  const Json* v = field(obj, key);
  if (!v) return def;
  if (!v->is_boolean()) throw ConfigError(path + "." + key, "expected true or false");
  return v->get<bool>();
}

inline std::string text(const Json& obj, const std::string& path, const char* key, const std::string& def) {
  const Json* v = field(obj, key);
  if (!v) return def;
  if (!v->is_string()) throw ConfigError(path + "." + key, "expected a string");
  return v->get<std::string>();
}

inline std::string choice(const Json& obj, const std::string& path, const char* key, const std::string& def,
                          const std::set<std::string>& allowed) {
  std::string s = text(obj, path, key, def);
  if (!allowed.count(s)) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
    throw ConfigError(path + "." + key, "expected one of " + list);
  }
  return s;
}

/// Section object (empty if absent); rejects keys outside `known`.
inline Json section(const Json& obj, const std::string& path, const char* key, const std::set<std::string>& known) {
  const Json* v = field(obj, key);
  const std::string p = path + "." + key;
  if (!v) return Json::object();
  if (!v->is_object()) throw ConfigError(p, "expected an object");
  for (auto it = v->begin(); it != v->end(); ++it) {
    if (!known.count(it.key())) throw ConfigError(p + "." + it.key(), "unknown field");
  }
  return *v;
}

}  // namespace cfg

/// Initial or target state recipe.
struct StateConfig {
  std::string kind = "random";  // random | plane_wave | zero | file
  std::string envelope = "gaussian";  // white | gaussian | sobolev
  double parameter = 4.0;
  double norm = 1.0;
  int k = 1;
  std::string path;

  FourierState build(const GridSpec& g, std::mt19937_64& rng) const {
    if (kind == "zero") return FourierState::zeros(g);
    if (kind == "plane_wave") {
      FourierState u = FourierState::zeros(g);
      u.coeffs()[g.dim() == 1 ? g.index_of(k) : static_cast<Eigen::Index>(g.index_of(k)) * g.modes_per_axis() + g.index_of(0)] = norm;
      return u;
    }
    if (kind == "file") {
      std::ifstream in(path);
      if (!in) throw ConfigError("state.path", "cannot open " + path);
      FourierState u = state_from_json(Json::parse(in));
      if (!(u.grid() == g)) throw ConfigError("state.path", "state grid does not match the configured grid");
      return u;
    }
    SpectralEnvelope env = envelope == "white"      ? SpectralEnvelope::white()
                           : envelope == "gaussian" ? SpectralEnvelope::gaussian(parameter)
                                                    : SpectralEnvelope::sobolev(parameter);
    return with_norm(random_state(g, rng, env), norm);
  }
};

struct ExperimentConfig {
  int dim = 1;
  int N = 64;

  std::vector<Interval> omega{{0.0, 0.2}};
  WindowKind window_kind = WindowKind::smooth;
  WindowProfile window_profile = WindowProfile::exp;
  double transition_width = 0.02;
  std::optional<double> window_constant;

  double horizon = 1.0;
  QuadRule quad_rule = QuadRule::gauss_legendre;
  int n_quad = 0;

  double solver_tol = 1e-10;
  int solver_max_iter = 500;
  bool solver_preconditioner = false;

  double sigma = -1.0;
  double dt = 1e-3;
  bool dealias = true;
  bool damping = true;

  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  int n_points = 512;
  std::optional<double> m;
  double m_factor = 2.0;
  bool adaptive = true;
  bool skip_infeasible = false;
  std::optional<double> high_frequency_R0;

  StateConfig initial_state;
  StateConfig target_state{"zero"};

  std::string simulate_model = "linear";  // linear | nls
  int record_points = 101;
  bool simulate_control = false;

  std::string control_model = "linear";  // linear | nls
  double picard_tol = 1e-9;
  int picard_max_iter = 60;

  std::string eigen_method = "auto";
  std::string sweep_report;
  double time_factor = 1.05;
  double cost_slack = 1.5;
  std::optional<double> regularity_s;
  int regularity_samples = 8;

  double stabilize_fraction = 0.0316227766016838;  // sqrt(1e-3): mass reduced 1000x
  double chunk = 10.0;
  double cap_factor = 50.0;

  double global_threshold = 0.2;

  std::string tensor_method = "auto";

  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool write_json = true;
  bool write_csv = true;

  GridSpec grid() const { return make_grid(dim, N); }

  CutoffWindow window() const {
    const GridSpec g = grid();
    if (window_constant) return constant_window(g, *window_constant);
    return make_window(g, omega, transition_width, window_kind, window_profile);
  }

  GramianSpec gramian_spec(double T) const { return make_gramian_spec(T, window(), n_quad, quad_rule); }
};

namespace detail {

inline StateConfig parse_state(const Json& root, const char* key, StateConfig def) {
  const Json s = cfg::section(root, "config", key, {"kind", "envelope", "parameter", "norm", "k", "path"});
  const std::string p = std::string("config.") + key;
  StateConfig c = def;
  c.kind = cfg::choice(s, p, "kind", c.kind, {"random", "plane_wave", "zero", "file"});
  c.envelope = cfg::choice(s, p, "envelope", c.envelope, {"white", "gaussian", "sobolev"});
  c.parameter = cfg::number(s, p, "parameter", c.parameter);
  c.norm = cfg::number(s, p, "norm", c.norm);
  c.k = static_cast<int>(cfg::integer(s, p, "k", c.k));
  c.path = cfg::text(s, p, "path", c.path);
  if (!(c.norm >= 0.0)) throw ConfigError(p + ".norm", "must be >= 0");
  if (c.envelope != "white" && c.kind == "random" && !(c.parameter > 0.0)) {
    throw ConfigError(p + ".parameter", "must be > 0");
  }
  if (c.kind == "file" && c.path.empty()) throw ConfigError(p + ".path", "required for kind=file");
  return c;
}

}  // namespace detail

/// Parses and validates every section; nothing is computed here.
inline ExperimentConfig parse_config(const Json& root) {
  if (!root.is_object()) throw ConfigError("config", "expected a JSON object");
  static const std::set<std::string> top{"grid",          "window",       "horizon",  "quadrature", "solver",
                                         "nls",           "sweep",        "seed",     "output",     "initial_state",
                                         "target_state",  "simulate",     "control",  "observability",
                                         "stabilize",     "global_control", "tensor"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (!top.count(it.key())) throw ConfigError("config." + it.key(), "unknown field");
  }
  ExperimentConfig c;

  const Json grid = cfg::section(root, "config", "grid", {"dim", "N"});
  c.dim = static_cast<int>(cfg::integer(grid, "config.grid", "dim", c.dim));
  c.N = static_cast<int>(cfg::integer(grid, "config.grid", "N", c.N));
  try {
    (void)c.grid();
  } catch (const ValidationError& e) {
    throw ConfigError("config.grid", e.what());
  }

  const Json win = cfg::section(root, "config", "window", {"omega", "kind", "transition_width", "profile", "constant"});
  if (const Json* om = cfg::field(win, "omega")) {
    if (!om->is_array()) throw ConfigError("config.window.omega", "expected [[a, b], ...]");
    c.omega.clear();
    for (std::size_t i = 0; i < om->size(); ++i) {
      const Json& iv = (*om)[i];
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
        throw ConfigError("config.window.omega[" + std::to_string(i) + "]", "expected [a, b]");
      }
      c.omega.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
  }
  c.window_kind = cfg::choice(win, "config.window", "kind", "smooth", {"sharp", "smooth"}) == "sharp"
                      ? WindowKind::sharp
                      : WindowKind::smooth;
  c.window_profile = cfg::choice(win, "config.window", "profile", "exp", {"exp", "polynomial"}) == "exp"
                         ? WindowProfile::exp
                         : WindowProfile::polynomial;
  c.transition_width = cfg::number(win, "config.window", "transition_width", c.transition_width);
  c.window_constant = cfg::optional_number(win, "config.window", "constant");
  try {
    (void)c.window();
  } catch (const ValidationError& e) {
    throw ConfigError("config.window", e.what());
  }

  c.horizon = cfg::number(root, "config", "horizon", c.horizon);
  if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) throw ConfigError("config.horizon", "must be > 0");

  const Json quad = cfg::section(root, "config", "quadrature", {"rule", "n_quad"});
  c.quad_rule = parse_quad_rule(
      cfg::choice(quad, "config.quadrature", "rule", "gauss-legendre", {"gauss-legendre", "trapezoid"}));
  c.n_quad = static_cast<int>(cfg::integer(quad, "config.quadrature", "n_quad", 0));
  if (c.n_quad != 0 && c.n_quad < 2) throw ConfigError("config.quadrature.n_quad", "must be 0 (auto) or >= 2");

  const Json sol = cfg::section(root, "config", "solver", {"tol", "max_iter", "preconditioner"});
  c.solver_tol = cfg::number(sol, "config.solver", "tol", c.solver_tol);
  c.solver_max_iter = static_cast<int>(cfg::integer(sol, "config.solver", "max_iter", c.solver_max_iter));
  c.solver_preconditioner = cfg::boolean(sol, "config.solver", "preconditioner", false);
  if (!(c.solver_tol > 0.0)) throw ConfigError("config.solver.tol", "must be > 0");
  if (c.solver_max_iter < 1) throw ConfigError("config.solver.max_iter", "must be >= 1");

  const Json nls = cfg::section(root, "config", "nls", {"sigma", "dt", "dealias", "damping"});
  c.sigma = cfg::number(nls, "config.nls", "sigma", c.sigma);
  c.dt = cfg::number(nls, "config.nls", "dt", c.dt);
  c.dealias = cfg::boolean(nls, "config.nls", "dealias", c.dealias);
  c.damping = cfg::boolean(nls, "config.nls", "damping", c.damping);
  if (c.sigma != 1.0 && c.sigma != -1.0) throw ConfigError("config.nls.sigma", "must be +1 or -1");
  if (!(c.dt > 0.0)) throw ConfigError("config.nls.dt", "must be > 0");

  const Json sw = cfg::section(root, "config", "sweep",
                               {"lambda_min", "lambda_max", "n_points", "m", "m_factor", "adaptive", "skip_infeasible",
                                "high_frequency_R0"});
  c.lambda_min = cfg::optional_number(sw, "config.sweep", "lambda_min");
  c.lambda_max = cfg::optional_number(sw, "config.sweep", "lambda_max");
  c.n_points = static_cast<int>(cfg::integer(sw, "config.sweep", "n_points", c.n_points));
  c.m = cfg::optional_number(sw, "config.sweep", "m");
  c.m_factor = cfg::number(sw, "config.sweep", "m_factor", c.m_factor);
  c.adaptive = cfg::boolean(sw, "config.sweep", "adaptive", c.adaptive);
  c.skip_infeasible = cfg::boolean(sw, "config.sweep", "skip_infeasible", c.skip_infeasible);
  c.high_frequency_R0 = cfg::optional_number(sw, "config.sweep", "high_frequency_R0");
  if (c.n_points < 1) throw ConfigError("config.sweep.n_points", "must be >= 1");
  if (c.m && !(*c.m > 0.0)) throw ConfigError("config.sweep.m", "must be > 0");
  if (!(c.m_factor >= 1.0)) throw ConfigError("config.sweep.m_factor", "must be >= 1");
  if (c.lambda_min && c.lambda_max && !(*c.lambda_min < *c.lambda_max)) {
    throw ConfigError("config.sweep.lambda_max", "must exceed lambda_min");
  }

  const long long seed = cfg::integer(root, "config", "seed", 1);
  if (seed < 0) throw ConfigError("config.seed", "must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);

  const Json out = cfg::section(root, "config", "output", {"dir", "formats"});
  c.out_dir = cfg::text(out, "config.output", "dir", c.out_dir);
  if (const Json* f = cfg::field(out, "formats")) {
    if (!f->is_array()) throw ConfigError("config.output.formats", "expected an array");
    c.write_json = c.write_csv = false;
    for (const auto& x : *f) {
      if (x == "json") c.write_json = true;
      else if (x == "csv") c.write_csv = true;
      else throw ConfigError("config.output.formats", "entries must be \"json\" or \"csv\"");
    }
  }

  c.initial_state = detail::parse_state(root, "initial_state", c.initial_state);
  c.target_state = detail::parse_state(root, "target_state", c.target_state);
  for (const auto& [key, st] : {std::pair{"initial_state", c.initial_state}, std::pair{"target_state", c.target_state}}) {
    if (st.kind != "file") continue;
    std::mt19937_64 unused;
    try {
      (void)st.build(c.grid(), unused);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config.") + key + ".path", std::string("malformed state file: ") + e.what());
    } catch (const ValidationError& e) {
      throw ConfigError(std::string("config.") + key + ".path", e.what());
    }
  }

  const Json sim = cfg::section(root, "config", "simulate", {"model", "record_points", "control"});
  c.simulate_model = cfg::choice(sim, "config.simulate", "model", c.simulate_model, {"linear", "nls"});
  c.record_points = static_cast<int>(cfg::integer(sim, "config.simulate", "record_points", c.record_points));
  c.simulate_control = cfg::boolean(sim, "config.simulate", "control", c.simulate_control);
  if (c.record_points < 2) throw ConfigError("config.simulate.record_points", "must be >= 2");

  const Json ctl = cfg::section(root, "config", "control", {"model", "picard_tol", "picard_max_iter"});
  c.control_model = cfg::choice(ctl, "config.control", "model", c.control_model, {"linear", "nls"});
  c.picard_tol = cfg::number(ctl, "config.control", "picard_tol", c.picard_tol);
  c.picard_max_iter = static_cast<int>(cfg::integer(ctl, "config.control", "picard_max_iter", c.picard_max_iter));
  if (!(c.picard_tol > 0.0)) throw ConfigError("config.control.picard_tol", "must be > 0");
  if (c.picard_max_iter < 1) throw ConfigError("config.control.picard_max_iter", "must be >= 1");

  const Json obs = cfg::section(root, "config", "observability",
                                {"method", "sweep_report", "time_factor", "cost_slack", "regularity_s",
                                 "regularity_samples"});
  c.eigen_method = cfg::choice(obs, "config.observability", "method", c.eigen_method, {"auto", "dense", "lanczos"});
  c.sweep_report = cfg::text(obs, "config.observability", "sweep_report", c.sweep_report);
  c.time_factor = cfg::number(obs, "config.observability", "time_factor", c.time_factor);
  c.cost_slack = cfg::number(obs, "config.observability", "cost_slack", c.cost_slack);
  c.regularity_s = cfg::optional_number(obs, "config.observability", "regularity_s");
  c.regularity_samples =
      static_cast<int>(cfg::integer(obs, "config.observability", "regularity_samples", c.regularity_samples));
  if (!(c.time_factor > 1.0)) throw ConfigError("config.observability.time_factor", "must be > 1");
  if (!(c.cost_slack > 0.0)) throw ConfigError("config.observability.cost_slack", "must be > 0");
  if (c.regularity_s && !(*c.regularity_s >= 0.0)) throw ConfigError("config.observability.regularity_s", "must be >= 0");
  if (!c.sweep_report.empty() && !std::ifstream(c.sweep_report)) {
    throw ConfigError("config.observability.sweep_report", "cannot open " + c.sweep_report);
  }
  if (c.regularity_samples < 1) throw ConfigError("config.observability.regularity_samples", "must be >= 1");

  const Json st = cfg::section(root, "config", "stabilize", {"threshold_fraction", "chunk", "cap_factor"});
  c.stabilize_fraction = cfg::number(st, "config.stabilize", "threshold_fraction", c.stabilize_fraction);
  c.chunk = cfg::number(st, "config.stabilize", "chunk", c.chunk);
  c.cap_factor = cfg::number(st, "config.stabilize", "cap_factor", c.cap_factor);
  if (!(c.stabilize_fraction > 0.0 && c.stabilize_fraction < 1.0)) {
    throw ConfigError("config.stabilize.threshold_fraction", "must lie in (0, 1)");
  }
  if (!(c.chunk > 0.0)) throw ConfigError("config.stabilize.chunk", "must be > 0");
  if (!(c.cap_factor > 0.0)) throw ConfigError("config.stabilize.cap_factor", "must be > 0");

  const Json gc = cfg::section(root, "config", "global_control", {"threshold"});
  c.global_threshold = cfg::number(gc, "config.global_control", "threshold", c.global_threshold);
  if (!(c.global_threshold > 0.0)) throw ConfigError("config.global_control.threshold", "must be > 0");

  const Json ts = cfg::section(root, "config", "tensor", {"method"});
  c.tensor_method =
      cfg::choice(ts, "config.tensor", "method", c.tensor_method, {"auto", "dense_full", "dense_blocks", "krylov"});
  return c;
}

/// Normalized configuration with every default filled in.
inline Json config_to_json(const ExperimentConfig& c) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json omega = Json::array();
  for (const auto& iv : c.omega) omega.push_back({iv.a, iv.b});
  auto state = [](const StateConfig& s) {
    return Json{{"kind", s.kind}, {"envelope", s.envelope}, {"parameter", s.parameter},
                {"norm", s.norm}, {"k", s.k},               {"path", s.path}};
  };
  Json formats = Json::array();
  if (c.write_json) formats.push_back("json");
  if (c.write_csv) formats.push_back("csv");
  return Json{
      {"grid", {{"dim", c.dim}, {"N", c.N}}},
      {"window",
       {{"omega", omega},
        {"kind", to_string(c.window_kind)},
        {"transition_width", c.transition_width},
        {"profile", to_string(c.window_profile)},
        {"constant", opt(c.window_constant)}}},
      {"horizon", c.horizon},
      {"quadrature", {{"rule", to_string(c.quad_rule)}, {"n_quad", c.n_quad}}},
      {"solver", {{"tol", c.solver_tol}, {"max_iter", c.solver_max_iter}, {"preconditioner", c.solver_preconditioner}}},
      {"nls", {{"sigma", c.sigma}, {"dt", c.dt}, {"dealias", c.dealias}, {"damping", c.damping}}},
      {"sweep",
       {{"lambda_min", opt(c.lambda_min)},
        {"lambda_max", opt(c.lambda_max)},
        {"n_points", c.n_points},
        {"m", opt(c.m)},
        {"m_factor", c.m_factor},
        {"adaptive", c.adaptive},
        {"skip_infeasible", c.skip_infeasible},
        {"high_frequency_R0", opt(c.high_frequency_R0)}}},
      {"seed", c.seed},
      {"output", {{"dir", c.out_dir}, {"formats", formats}}},
      {"initial_state", state(c.initial_state)},
      {"target_state", state(c.target_state)},
      {"simulate", {{"model", c.simulate_model}, {"record_points", c.record_points}, {"control", c.simulate_control}}},
      {"control", {{"model", c.control_model}, {"picard_tol", c.picard_tol}, {"picard_max_iter", c.picard_max_iter}}},
      {"observability",
       {{"method", c.eigen_method},
        {"sweep_report", c.sweep_report},
        {"time_factor", c.time_factor},
        {"cost_slack", c.cost_slack},
        {"regularity_s", opt(c.regularity_s)},
        {"regularity_samples", c.regularity_samples}}},
      {"stabilize", {{"threshold_fraction", c.stabilize_fraction}, {"chunk", c.chunk}, {"cap_factor", c.cap_factor}}},
      {"global_control", {{"threshold", c.global_threshold}}},
      {"tensor", {{"method", c.tensor_method}}},
  };
}

}  // namespace schrocon
