// Command-line front end. Every subcommand builds a RunConfig, runs the
// matching suites and emits a report; the exit code is 0 (pass), 1 (fail)
// or 2 (error).

#include "gmtlab/errors.hpp"
#include "gmtlab/parallel.hpp"
#include "gmtlab/report.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct Flags {
  std::string config_path;
  std::map<std::string, std::string> settings;
};

// Registers the flags shared by every subcommand. Values are kept as text and
// fed through apply_setting so the CLI and config files share one parser.
void add_common(CLI::App* sub, Flags& flags) {
  auto text = [&](const std::string& name, const std::string& key,
                  const std::string& help) {
    sub->add_option_function<std::string>(
        name, [&flags, key](const std::string& v) { flags.settings[key] = v; }, help);
  };
  sub->add_option("--config", flags.config_path, "key = value config file");
  text("--measure", "measure", "plane[:k:n1], sphere[:k:rho], s3_in_r4 or kp_cone");
  text("--density", "density", "density constant c");
  text("--radius,--radii", "radii", "comma-separated radii in (0, 1]");
  text("--centers", "centers", "points as x,y,z;x,y,z");
  text("--tol", "tol", "uniformity / distribution tolerance");
  text("--identity-tol", "identity_tol", "identity residual tolerance");
  text("--rel-tol", "rel_tol", "quadrature relative tolerance");
  text("--seed", "seed", "random seed");
  text("--out", "out", "output path (default stdout)");
  text("--format", "format", "json or csv");
  text("--policy", "policy", "serial or parallel");
  sub->add_flag_callback("--timing", [&flags] { flags.settings["timing"] = "true"; },
                         "record wall-clock time in the report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for locally k-uniform measures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gmtlab::kToolVersion);

  Flags flags;
  std::map<CLI::App*, std::vector<std::string>> suites;
  auto make = [&](const std::string& name, const std::string& help,
                  std::vector<std::string> run) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    suites[sub] = std::move(run);
    return sub;
  };

  make("verify-identities", "moment identities, lemma and Taylor checks", {"identities"});
  make("check-uniformity", "ball-mass uniformity and distribution checks",
       {"uniformity", "distributed"});
  CLI::App* scan = make("curvature-scan", "mean curvature and strong continuation probe",
                        {"sucp"});
  scan->add_option_function<std::string>(
      "--chain-length", [&](const std::string& v) { flags.settings["chain_length"] = v; },
      "balls per continuation chain");
  CLI::App* wucp = make("wucp", "flat-patch continuation probe", {"wucp"});
  wucp->add_option_function<std::string>(
      "--r0", [&](const std::string& v) { flags.settings["r0"] = v; }, "patch radius");
  wucp->add_option_function<std::string>(
      "--k-guess", [&](const std::string& v) { flags.settings["k_guess"] = v; },
      "plane dimension to test");
  make("dimension", "log-log dimension fit and density limits", {"dimension"});
  CLI::App* report = make("report", "run configured suites", {});
  report->add_option_function<std::string>(
      "--suite", [&](const std::string& v) { flags.settings["suite"] = v; },
      "comma-separated suites or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    gmtlab::apply_thread_cap_from_env();
    CLI::App* sub = app.get_subcommands().front();
    gmtlab::RunConfig config;
    if (!flags.config_path.empty()) config = gmtlab::load_config_file(flags.config_path);
    if (!suites[sub].empty()) config.suites = suites[sub];
    for (const auto& [key, value] : flags.settings) gmtlab::apply_setting(config, key, value);
    const gmtlab::ReportEnvelope result = gmtlab::run(config);
    gmtlab::emit(result, config.format, config.out);
    return gmtlab::exit_code(result);
  } catch (const std::exception& e) {
    std::cerr << "gmtlab: " << e.what() << "\n";
    return 2;
  }
}
