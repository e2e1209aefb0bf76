// quadmap command line: run scenario files, reproduce the figure presets,
// execute the verification suites, and run the reference solver for external
// comparison.
//
// Exit codes: 0 success, 1 validation error, 2 numerical-suite failure.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "quadmap/suites.hpp"

namespace {

int write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file '" << path << "'\n";
    return 1;
  }
  out << content;
  return out.good() ? 0 : 1;
}

int emit_dataset(const quadmap::RuntimeScenario& rt, const std::string& out_path,
                 const std::string& observables_path) {
  const quadmap::WaveEvaluator psi =
      quadmap::build_timeline(rt.scenario, rt.file.params);

  std::ostringstream csv;
  quadmap::write_dataset_csv(csv, rt, psi);
  if (out_path.empty()) {
    std::cout << csv.str();
  } else if (int rc = write_file(out_path, csv.str()); rc != 0) {
    return rc;
  }

  const bool want_obs = !observables_path.empty() || rt.file.output.want_observables;
  if (want_obs) {
    std::ostringstream json;
    quadmap::write_observables_json(json, rt, psi);
    if (observables_path.empty())
      std::cerr << json.str();
    else if (int rc = write_file(observables_path, json.str()); rc != 0)
      return rc;
  }
  return 0;
}

void print_suite(const quadmap::SuiteReport& rep) {
  for (const auto& c : rep.checks)
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": value "
              << quadmap::detail::fmt_double(c.value) << " vs threshold "
              << quadmap::detail::fmt_double(c.threshold) << " (" << c.note
              << ")\n";
  // Machine-readable summary line.
  std::ostringstream js;
  js << "{\"failures\": [";
  bool first = true;
  for (const auto& c : rep.checks) {
    if (c.pass) continue;
    if (!first) js << ", ";
    first = false;
    js << "{\"check\": \"" << c.name
       << "\", \"value\": " << quadmap::detail::fmt_double(c.value)
       << ", \"threshold\": " << quadmap::detail::fmt_double(c.threshold) << "}";
  }
  js << "], \"passed\": " << (rep.all_pass() ? "true" : "false") << "}";
  std::cout << js.str() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"map-based simulator for wavepackets in piecewise-quadratic "
               "potentials"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, observables_path, figure_name;
  std::string suite = "all";
  double oracle_dt = 1e-4;

  auto* cmd_run = app.add_subcommand("run", "simulate a scenario file");
  cmd_run->add_option("scenario", scenario_path, "scenario file")->required();
  cmd_run->add_option("--out", out_path, "CSV output path (default: stdout)");
  cmd_run->add_option("--observables", observables_path,
                      "observables JSON sidecar path");

  auto* cmd_fig = app.add_subcommand("figure", "run a built-in figure preset");
  cmd_fig->add_option("name", figure_name, "fig1 | fig2 | fig3 | fig4 | fig5")
      ->required();
  cmd_fig->add_option("--out", out_path, "CSV output path (default: stdout)");
  cmd_fig->add_option("--observables", observables_path,
                      "observables JSON sidecar path");
  std::string preset_out;
  cmd_fig->add_option("--scenario-out", preset_out,
                      "also write the preset scenario file");

  auto* cmd_verify = app.add_subcommand("verify", "run verification suites");
  cmd_verify->add_option("--suite", suite, "residual | oracle | continuity | all")
      ->capture_default_str();

  auto* cmd_oracle = app.add_subcommand(
      "oracle", "run the reference solver on a scenario for external comparison");
  cmd_oracle->add_option("scenario", scenario_path, "scenario file")->required();
  cmd_oracle->add_option("--out", out_path, "CSV output path (default: stdout)");
  cmd_oracle->add_option("--dt", oracle_dt, "time step")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const auto rt = quadmap::build_runtime(quadmap::parse_scenario(scenario_path));
      return emit_dataset(rt, out_path, observables_path);
    }
    if (cmd_fig->parsed()) {
      const auto sf = quadmap::figure_preset(figure_name);
      if (!preset_out.empty())
        if (int rc = write_file(preset_out, quadmap::serialize_scenario(sf)); rc != 0)
          return rc;
      return emit_dataset(quadmap::build_runtime(sf), out_path, observables_path);
    }
    if (cmd_verify->parsed()) {
      const quadmap::SuiteReport rep = quadmap::run_verify_suite(suite);
      print_suite(rep);
      return rep.all_pass() ? 0 : 2;
    }
    if (cmd_oracle->parsed()) {
      const auto rt = quadmap::build_runtime(quadmap::parse_scenario(scenario_path));
      std::ostringstream csv;
      quadmap::write_oracle_csv(csv, rt, oracle_dt);
      if (out_path.empty()) {
        std::cout << csv.str();
        return 0;
      }
      return write_file(out_path, csv.str());
    }
  } catch (const quadmap::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const quadmap::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
