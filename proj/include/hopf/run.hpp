#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hopf/bvp.hpp"
#include "hopf/common.hpp"
#include "hopf/propagation.hpp"
#include "hopf/spectral_system.hpp"

namespace hopf {

enum class RunMode { unbounded, bvp };
enum class Estimator { arg_increment, finite_difference, both };
enum class PathChoice { automatic, closed_form, continuation };
enum class Command { phase, trace, oracle, bvp, check };

/// Parsed run configuration. `problem` is a registered name or an inline JSON
/// object (kept as text and resolved when the run starts).
struct RunConfig {
  std::string problem;
  bool problem_inline = false;
  RunMode mode = RunMode::unbounded;
  std::optional<cplx> center;
  std::optional<double> radius;
  std::size_t samples = 2000;
  std::optional<double> xi0;
  std::optional<double> xi1;
  std::vector<double> xi_grid;
  Scaling scaling = Scaling::shift_minus;
  int degenerate_scaling_power = 0;
  Estimator estimator = Estimator::both;
  bool oracle = true;
  std::string output_dir = "hopf_out";
  double step = 0.01;
  Method method = Method::rk4;
  PathChoice path = PathChoice::automatic;
  double bvp_step = 1e-3;
};

/// Parses the JSON schema documented in the README. Configuration error on
/// malformed input or missing required fields.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

Scaling parse_scaling(const std::string& name);
Estimator parse_estimator(const std::string& name);

/// Builds the problem named or defined in the config.
SpectralProblem resolve_problem(const RunConfig& config);
BvpProblem resolve_bvp(const RunConfig& config);

struct RunReport {
  int exit_code = 0;
  std::string stage;
  std::string summary;  // JSON text
  std::vector<std::string> files;
};

/// Executes a command. Exit code 0 on success, 1 on configuration errors (no
/// files written), 2 on method errors (summary names the failing stage).
RunReport run(const RunConfig& config, Command command);

}  // namespace hopf
