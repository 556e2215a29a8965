#include "hopf/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "hopf/contour.hpp"
#include "hopf/eigenpath.hpp"
#include "hopf/evans.hpp"
#include "hopf/expression.hpp"
#include "hopf/phase.hpp"

namespace hopf {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::configuration, what);
}

double number(const json& j, const char* field) {
  if (!j.is_number()) config_error(std::string("field '") + field + "' must be a number");
  return j.get<double>();
}

cplx complex_value(const json& j, const char* field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  config_error(std::string("field '") + field + "' must be a number or [re, im]");
}

std::vector<double> parse_grid(const json& j) {
  std::vector<double> grid;
  if (j.is_array()) {
    for (const auto& v : j) grid.push_back(number(v, "xi_grid"));
    return grid;
  }
  if (!j.is_object()) config_error("xi_grid must be an array or {start, stop, step}");
  const double start = number(j.at("start"), "xi_grid.start");
  const double stop = number(j.at("stop"), "xi_grid.stop");
  const double step = number(j.at("step"), "xi_grid.step");
  if (!(step > 0.0) || stop < start) config_error("xi_grid needs step > 0 and stop >= start");
  const long count = std::lround((stop - start) / step);
  for (long i = 0; i <= count; ++i) grid.push_back(start + step * static_cast<double>(i));
  return grid;
}

std::string entry_text(const json& e) {
  if (e.is_string()) return e.get<std::string>();
  if (e.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << e.get<double>();
    return os.str();
  }
  config_error("matrix entries must be strings or numbers");
}

using ExprMatrix = std::vector<std::vector<Expression>>;

std::shared_ptr<const ExprMatrix> parse_matrix(const json& j, int rows, int cols,
                                               const std::vector<std::string>& vars,
                                               const char* field) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    config_error(std::string("'") + field + "' must have " + std::to_string(rows) + " rows");
  }
  auto m = std::make_shared<ExprMatrix>();
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      config_error(std::string("'") + field + "' rows must have " + std::to_string(cols) +
                   " entries");
    }
    std::vector<Expression> r;
    for (const auto& e : row) r.push_back(Expression::parse(entry_text(e), vars));
    m->push_back(std::move(r));
  }
  return m;
}

MatrixXcd evaluate(const ExprMatrix& m, std::initializer_list<cplx> values) {
  const auto rows = static_cast<Eigen::Index>(m.size());
  const auto cols = static_cast<Eigen::Index>(m.front().size());
  MatrixXcd out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = m[r][c](values);
  }
  return out;
}

int positive_int(const json& j, const char* field) {
  if (!j.is_number_integer() || j.get<int>() < 1) {
    config_error(std::string("'") + field + "' must be a positive integer");
  }
  return j.get<int>();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
}

const char* to_string(Scaling s) {
  switch (s) {
    case Scaling::none: return "none";
    case Scaling::shift_minus: return "shift";
    case Scaling::shift_plus: return "shift_plus";
    case Scaling::gamma: return "gamma";
  }
  return "?";
}

const char* to_string(Command c) {
  switch (c) {
    case Command::phase: return "phase";
    case Command::trace: return "trace";
    case Command::oracle: return "oracle";
    case Command::bvp: return "bvp";
    case Command::check: return "check";
  }
  return "?";
}

struct Pipeline {
  const RunConfig& config;
  Command command;
  json summary;
  std::string stage = "configuration";
  std::vector<std::string> files;
  std::filesystem::path dir;

  std::string file(const std::string& name) {
    const auto p = (dir / name).string();
    files.push_back(p);
    return p;
  }
};

Contour make_contour(const RunConfig& config) {
  if (!config.center || !config.radius) config_error("contour needs center and radius");
  return discretize_contour(*config.center, *config.radius, config.samples);
}

void run_unbounded(Pipeline& p) {
  const RunConfig& c = p.config;
  const SpectralProblem problem = resolve_problem(c);
  const Contour contour = make_contour(c);
  PropagationConfig prop;
  const double half = default_half_window(problem);
  prop.xi0 = c.xi0.value_or(-half);
  prop.xi1 = c.xi1.value_or(half);
  prop.step = c.step;
  prop.method = c.method;
  prop.scaling = c.scaling;
  prop.validate();
  if (c.path == PathChoice::closed_form && !(problem.k == 1 && problem.unstable_minus)) {
    config_error("problem has no closed-form unstable eigenvector");
  }
  if (p.command == Command::trace && c.xi_grid.empty()) config_error("trace needs xi_grid");
  for (std::size_t i = 0; i < c.xi_grid.size(); ++i) {
    if (!(c.xi_grid[i] > prop.xi0) || (i > 0 && !(c.xi_grid[i] > c.xi_grid[i - 1]))) {
      config_error("xi_grid must be increasing and lie above xi0");
    }
  }
  if (c.estimator != Estimator::both && c.estimator != Estimator::arg_increment &&
      c.estimator != Estimator::finite_difference) {
    config_error("unknown estimator");
  }
  p.summary["problem"] = problem.label;
  p.summary["window"] = {{"xi0", prop.xi0}, {"xi1", prop.xi1}};
  p.summary["scaling"] = to_string(c.scaling);

  std::filesystem::create_directories(p.dir);

  p.stage = "splitting";
  const SplittingReport split = check_splitting(problem, contour);
  p.summary["splitting"] = {{"ok", split.ok}, {"min_spectral_gap", split.min_spectral_gap}};
  if (!split.ok) throw Error(ErrorKind::splitting, split.detail);
  if (p.command == Command::check) return;

  EvansConfig evans;
  evans.xi0 = prop.xi0;
  evans.xi1 = prop.xi1;
  evans.step = prop.step;
  evans.method = prop.method;
  auto run_oracle = [&] {
    p.stage = "oracle";
    const EvansWinding w = evans_winding(problem, contour, evans);
    write_evans_csv(p.file("evans.csv"), w.samples);
    p.summary["oracle_winding"] = w.winding;
    p.summary["oracle_raw"] = w.raw;
    p.summary["oracle_min_abs"] = w.min_abs;
    return w.winding;
  };
  if (p.command == Command::oracle) {
    run_oracle();
    return;
  }

  p.stage = "eigenpath";
  const bool closed = c.path != PathChoice::continuation && problem.k == 1 &&
                      static_cast<bool>(problem.unstable_minus);
  const PathMode mode = problem.k == 1 ? PathMode::top_eigenvector : PathMode::unstable_wedge;
  EigenPath path = closed ? eigenpath_closed_form(problem, contour, problem.unstable_minus,
                                                  End::minus)
                          : eigenpath_continuation(problem, contour, End::minus, mode);
  path = scale_path(path, c.degenerate_scaling_power);
  p.summary["initial_path"] = closed ? "closed_form" : "continuation";
  p.summary["closure_defect"] = path.closure_defect;

  p.stage = "propagation";
  const auto basis = basis_for(problem, path);
  const auto results = batch_propagate(problem, path, prop, basis ? &*basis : nullptr);
  const LoopOfVectors loop = loop_from_trajectories(path.lambdas, results);
  write_loop_csv(p.file("loop.csv"), loop);

  p.stage = "phase";
  std::optional<double> arg_phase;
  std::optional<double> fd_phase;
  if (c.estimator != Estimator::finite_difference) arg_phase = geometric_phase(loop);
  if (c.estimator != Estimator::arg_increment) fd_phase = finite_difference_phase(loop);
  const PhaseEstimate estimate = make_estimate(arg_phase ? *arg_phase : *fd_phase);
  p.summary["phase"] = estimate.value;
  p.summary["count"] = estimate.count;
  p.summary["residual"] = estimate.residual;
  p.summary["quantized"] = estimate.quantized;
  if (fd_phase) p.summary["finite_difference_phase"] = *fd_phase;
  if (arg_phase && fd_phase) p.summary["estimator_gap"] = std::abs(*arg_phase - *fd_phase);
  p.summary["degenerate_scaling"] = c.degenerate_scaling_power != 0;
  p.summary["degenerate_scaling_power"] = c.degenerate_scaling_power;

  p.stage = "induced_phase";
  try {
    const bool closed_plus = c.path != PathChoice::continuation && problem.k == 1 &&
                             static_cast<bool>(problem.unstable_plus);
    const EigenPath reference =
        closed_plus ? eigenpath_closed_form(problem, contour, problem.unstable_plus, End::plus)
                    : eigenpath_continuation(problem, contour, End::plus, mode);
    p.summary["induced_winding"] = induced_phase_winding(loop, reference);
  } catch (const Error& e) {
    p.summary["induced_winding"] = nullptr;
    p.summary["induced_winding_note"] = e.what();
  }

  if (c.oracle) {
    const long w = run_oracle();
    p.summary["agreement"] = w == estimate.count;
  }

  if (!c.xi_grid.empty()) {
    p.stage = "trace";
    const PhaseTrace trace = phase_trace(problem, path, prop, c.xi_grid);
    write_trace_csv(p.file("trace.csv"), trace);
    p.summary["transition_xi"] =
        trace.transition_xi ? json(*trace.transition_xi) : json(nullptr);
    p.summary["trace_final_phase"] = trace.phase.back();
  }
}

void run_bvp(Pipeline& p) {
  const RunConfig& c = p.config;
  const BvpProblem problem = resolve_bvp(c);
  const Contour contour = make_contour(c);
  if (!(c.bvp_step > 0.0)) config_error("bvp_step must be positive");
  p.summary["problem"] = problem.label;
  std::filesystem::create_directories(p.dir);

  p.stage = "bvp";
  BvpConfig config;
  config.step = c.bvp_step;
  config.method = c.method;
  const BvpResult result = bvp_phase(problem, contour, config);
  write_loop_csv(p.file("loop.csv"), result.loop);
  p.summary["phase"] = result.estimate.value;
  p.summary["count"] = result.estimate.count;
  p.summary["residual"] = result.estimate.residual;
  p.summary["quantized"] = result.estimate.quantized;
  if (c.estimator != Estimator::arg_increment) {
    p.summary["finite_difference_phase"] = finite_difference_phase(result.loop);
  }
}

}  // namespace

Scaling parse_scaling(const std::string& name) {
  if (name == "none") return Scaling::none;
  if (name == "shift" || name == "shift_minus") return Scaling::shift_minus;
  if (name == "shift_plus") return Scaling::shift_plus;
  if (name == "gamma") return Scaling::gamma;
  config_error("unknown scaling '" + name + "'");
}

Estimator parse_estimator(const std::string& name) {
  if (name == "arg_increment") return Estimator::arg_increment;
  if (name == "finite_difference") return Estimator::finite_difference;
  if (name == "both") return Estimator::both;
  config_error("unknown estimator '" + name + "'");
}

RunConfig parse_config(const std::string& json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) config_error("config must be a JSON object");
  static const char* known[] = {"problem", "mode",   "contour", "window",      "xi_grid",
                                "scaling", "degenerate_scaling_power", "estimator",
                                "oracle",  "output_dir", "step", "method", "path", "bvp_step"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known)) {
      config_error("unknown field '" + key + "'");
    }
  }
  RunConfig c;
  try {
    if (!j.contains("problem")) config_error("missing field 'problem'");
    const json& problem = j.at("problem");
    if (problem.is_string()) {
      c.problem = problem.get<std::string>();
    } else if (problem.is_object()) {
      c.problem = problem.dump();
      c.problem_inline = true;
    } else {
      config_error("'problem' must be a name or an object");
    }
    if (j.contains("mode")) {
      const auto m = j.at("mode").get<std::string>();
      if (m == "unbounded") {
        c.mode = RunMode::unbounded;
      } else if (m == "bvp") {
        c.mode = RunMode::bvp;
      } else {
        config_error("unknown mode '" + m + "'");
      }
    }
    if (!j.contains("contour")) config_error("missing field 'contour'");
    const json& contour = j.at("contour");
    if (!contour.is_object() || !contour.contains("center") || !contour.contains("radius")) {
      config_error("contour needs center and radius");
    }
    c.center = complex_value(contour.at("center"), "contour.center");
    c.radius = number(contour.at("radius"), "contour.radius");
    if (contour.contains("N")) c.samples = positive_int(contour.at("N"), "contour.N");
    if (c.samples < kMinContourSamples) config_error("contour.N must be at least 16");
    if (j.contains("window")) {
      const json& w = j.at("window");
      if (w.contains("xi0")) c.xi0 = number(w.at("xi0"), "window.xi0");
      if (w.contains("xi1")) c.xi1 = number(w.at("xi1"), "window.xi1");
      if (c.xi0 && c.xi1 && !(*c.xi0 < *c.xi1)) config_error("window needs xi0 < xi1");
    }
    if (j.contains("xi_grid")) c.xi_grid = parse_grid(j.at("xi_grid"));
    if (j.contains("scaling")) c.scaling = parse_scaling(j.at("scaling").get<std::string>());
    if (j.contains("degenerate_scaling_power")) {
      if (!j.at("degenerate_scaling_power").is_number_integer()) {
        config_error("degenerate_scaling_power must be an integer");
      }
      c.degenerate_scaling_power = j.at("degenerate_scaling_power").get<int>();
    }
    if (j.contains("estimator")) {
      c.estimator = parse_estimator(j.at("estimator").get<std::string>());
    }
    if (j.contains("oracle")) c.oracle = j.at("oracle").get<bool>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("step")) c.step = number(j.at("step"), "step");
    if (j.contains("bvp_step")) c.bvp_step = number(j.at("bvp_step"), "bvp_step");
    if (j.contains("method")) {
      const auto m = j.at("method").get<std::string>();
      if (m == "rk4") {
        c.method = Method::rk4;
      } else if (m == "rk45") {
        c.method = Method::rk45;
      } else {
        config_error("unknown method '" + m + "'");
      }
    }
    if (j.contains("path")) {
      const auto m = j.at("path").get<std::string>();
      if (m == "auto") {
        c.path = PathChoice::automatic;
      } else if (m == "closed_form") {
        c.path = PathChoice::closed_form;
      } else if (m == "continuation") {
        c.path = PathChoice::continuation;
      } else {
        config_error("unknown path choice '" + m + "'");
      }
    }
  } catch (const json::exception& e) {
    config_error(std::string("bad config value: ") + e.what());
  }
  if (!(c.step > 0.0)) config_error("step must be positive");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

SpectralProblem resolve_problem(const RunConfig& config) {
  if (config.mode != RunMode::unbounded) config_error("problem is not an unbounded-domain problem");
  if (!config.problem_inline) return find_problem(config.problem);
  const json j = parse_json(config.problem);
  try {
    SpectralProblem p;
    p.label = j.value("label", std::string("inline"));
    p.n = positive_int(j.at("n"), "problem.n");
    p.k = positive_int(j.at("k"), "problem.k");
    if (p.k >= p.n) config_error("problem needs k < n");
    p.decay_rate = j.contains("decay_rate") ? number(j.at("decay_rate"), "decay_rate") : 1.0;
    if (!(p.decay_rate > 0.0)) config_error("decay_rate must be positive");
    auto a = parse_matrix(j.at("matrix"), p.n, p.n, {"lambda", "xi"}, "matrix");
    p.coefficient = [a](cplx lambda, double xi) { return evaluate(*a, {lambda, xi}); };
    const double far = 50.0 / p.decay_rate;
    auto asymptotic = [&](const char* field, double xi) -> AsymptoticFn {
      if (j.contains(field)) {
        auto m = parse_matrix(j.at(field), p.n, p.n, {"lambda"}, field);
        return [m](cplx lambda) { return evaluate(*m, {lambda}); };
      }
      return [a, xi](cplx lambda) { return evaluate(*a, {lambda, xi}); };
    };
    p.asym_minus = asymptotic("minus", -far);
    p.asym_plus = asymptotic("plus", far);
    return p;
  } catch (const json::exception& e) {
    config_error(std::string("bad inline problem: ") + e.what());
  }
}

BvpProblem resolve_bvp(const RunConfig& config) {
  if (!config.problem_inline) return find_bvp(config.problem);
  const json j = parse_json(config.problem);
  try {
    BvpProblem p;
    p.label = j.value("label", std::string("inline"));
    p.n = positive_int(j.at("n"), "problem.n");
    p.k = positive_int(j.at("k"), "problem.k");
    if (p.k >= p.n) config_error("problem needs k < n");
    auto a = parse_matrix(j.at("matrix"), p.n, p.n, {"lambda", "x"}, "matrix");
    p.coefficient = [a](cplx lambda, double x) { return evaluate(*a, {lambda, x}); };
    auto family = [&](const char* field, int count) {
      auto m = parse_matrix(j.at(field), count, p.n, {"lambda"}, field);
      std::vector<BoundaryFn> out;
      for (int i = 0; i < count; ++i) {
        // Entries are written in terms of conj(lambda); evaluate at lambda = conj(lambda_bar).
        out.push_back([m, i](cplx lambda_bar) {
          return VectorXcd(evaluate(*m, {std::conj(lambda_bar)}).row(i).transpose());
        });
      }
      return out;
    };
    p.left = family("left", p.n - p.k);
    p.right = family("right", p.k);
    return p;
  } catch (const json::exception& e) {
    config_error(std::string("bad inline BVP: ") + e.what());
  }
}

RunReport run(const RunConfig& config, Command command) {
  Pipeline p{config, command, json::object(), "configuration", {}, {}};
  p.dir = config.output_dir;
  p.summary["command"] = to_string(command);
  p.summary["contour"] = {
      {"center", config.center ? json::array({config.center->real(), config.center->imag()})
                               : json(nullptr)},
      {"radius", config.radius ? json(*config.radius) : json(nullptr)},
      {"N", config.samples}};
  RunReport report;
  try {
    if (command == Command::bvp || config.mode == RunMode::bvp) {
      if (command != Command::bvp && command != Command::phase) {
        config_error("BVP mode supports the bvp and phase commands only");
      }
      RunConfig bvp = config;
      bvp.mode = RunMode::bvp;
      Pipeline q{bvp, command, p.summary, "configuration", {}, {}};
      q.dir = p.dir;
      run_bvp(q);
      p.summary = q.summary;
      p.stage = q.stage;
      p.files = q.files;
    } else {
      run_unbounded(p);
    }
    p.summary["status"] = "ok";
    report.exit_code = 0;
  } catch (const Error& e) {
    p.summary["status"] = "error";
    p.summary["stage"] = p.stage;
    p.summary["error_kind"] = to_string(e.kind());
    p.summary["message"] = e.what();
    report.exit_code = e.kind() == ErrorKind::configuration ? 1 : 2;
  } catch (const std::exception& e) {
    p.summary["status"] = "error";
    p.summary["stage"] = p.stage;
    p.summary["error_kind"] = "internal";
    p.summary["message"] = e.what();
    report.exit_code = 2;
  }
  report.stage = p.stage;
  if (report.exit_code != 1) {
    p.summary["files"] = p.files;
    const auto summary_path = (p.dir / "summary.json").string();
    std::filesystem::create_directories(p.dir);
    std::ofstream(summary_path) << p.summary.dump(2) << '\n';
    p.files.push_back(summary_path);
  }
  report.summary = p.summary.dump(2);
  report.files = p.files;
  return report;
}

}  // namespace hopf
