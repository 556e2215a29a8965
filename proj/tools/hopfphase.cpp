// Command-line front end: hopfphase <phase|trace|oracle|bvp|check> --config run.json [overrides]

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hopf/run.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> problem;
  std::optional<double> center_re;
  std::optional<double> center_im;
  std::optional<double> radius;
  std::optional<std::size_t> samples;
  std::optional<double> xi0;
  std::optional<double> xi1;
  std::optional<std::string> scaling;
  std::optional<int> power;
  std::optional<std::string> estimator;
  std::optional<bool> oracle;
  std::optional<std::string> output_dir;
  std::optional<double> step;
};

void add_options(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config_path, "JSON run configuration")->required();
  app->add_option("--problem", o.problem, "registered problem name");
  app->add_option("--center-re", o.center_re, "contour centre, real part");
  app->add_option("--center-im", o.center_im, "contour centre, imaginary part");
  app->add_option("--radius", o.radius, "contour radius");
  app->add_option("-N,--samples", o.samples, "contour samples");
  app->add_option("--xi0", o.xi0, "left window end");
  app->add_option("--xi1", o.xi1, "right window end");
  app->add_option("--scaling", o.scaling, "none | shift | gamma");
  app->add_option("--power", o.power, "degenerate scaling power p (lambda^p)");
  app->add_option("--estimator", o.estimator, "arg_increment | finite_difference | both");
  app->add_option("--oracle", o.oracle, "run the Evans oracle (true/false)");
  app->add_option("-o,--output-dir", o.output_dir, "output directory");
  app->add_option("--step", o.step, "integration step");
}

hopf::RunConfig apply(const Overrides& o) {
  hopf::RunConfig c = hopf::load_config(o.config_path);
  if (o.problem) {
    c.problem = *o.problem;
    c.problem_inline = false;
  }
  if (o.center_re || o.center_im) {
    const hopf::cplx old = c.center.value_or(0.0);
    c.center = hopf::cplx(o.center_re.value_or(old.real()), o.center_im.value_or(old.imag()));
  }
  if (o.radius) c.radius = *o.radius;
  if (o.samples) c.samples = *o.samples;
  if (o.xi0) c.xi0 = *o.xi0;
  if (o.xi1) c.xi1 = *o.xi1;
  if (o.scaling) c.scaling = hopf::parse_scaling(*o.scaling);
  if (o.power) c.degenerate_scaling_power = *o.power;
  if (o.estimator) c.estimator = hopf::parse_estimator(*o.estimator);
  if (o.oracle) c.oracle = *o.oracle;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.step) c.step = *o.step;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric-phase eigenvalue counting for linearised travelling waves"};
  app.require_subcommand(1);
  Overrides overrides;
  const std::pair<const char*, hopf::Command> commands[] = {
      {"phase", hopf::Command::phase},   {"trace", hopf::Command::trace},
      {"oracle", hopf::Command::oracle}, {"bvp", hopf::Command::bvp},
      {"check", hopf::Command::check},
  };
  const char* help[] = {"geometric phase of the propagated loop",
                        "phase versus integration endpoint",
                        "Evans-function winding only",
                        "boundary-value-problem phase",
                        "splitting check only"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    subs.push_back(app.add_subcommand(commands[i].first, help[i]));
    add_options(subs.back(), overrides);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  hopf::Command command = hopf::Command::phase;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) command = commands[i].second;
  }
  hopf::RunConfig config;
  try {
    config = apply(overrides);
  } catch (const hopf::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  }
  const hopf::RunReport report = hopf::run(config, command);
  std::cout << report.summary << '\n';
  if (report.exit_code != 0) {
    std::cerr << "failed at stage '" << report.stage << "'\n";
  }
  return report.exit_code;
}
