#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "swe/scenario.hpp"
#include "swe/stability.hpp"
#include "swe/text_format.hpp"
#include "swe/verification.hpp"

namespace {

constexpr int kExitBlowUp = 2;
constexpr int kExitIterationFailure = 3;
constexpr int kExitConfig = 4;

int exit_code(swe::RunStatus status) {
  switch (status) {
    case swe::RunStatus::Completed: return 0;
    case swe::RunStatus::BlowUp: return kExitBlowUp;
    case swe::RunStatus::IterationFailure: return kExitIterationFailure;
  }
  return 1;
}

/// Worst status of a table: divergence outranks solver failure.
int exit_code(const std::vector<swe::ErrorReport>& table) {
  int code = 0;
  for (const auto& r : table) {
    const int c = exit_code(r.status);
    if (c == kExitBlowUp) return c;
    code = std::max(code, c);
  }
  return code;
}

double pow3(int e) { return std::pow(3.0, e); }

swe::ThackerCase to_case(int example) {
  if (example == 1) return swe::ThackerCase::Radial;
  if (example == 2) return swe::ThackerCase::Planar;
  throw swe::ConfigError(0, "example must be 1 or 2");
}

struct VerifyOptions {
  int example = 1;
  double dx = 1.0 / 27.0;
  std::optional<double> k;
  double gamma = 18.0;
  std::optional<double> t_end;
  bool no_clamp = false;
};

int cmd_verify(const VerifyOptions& o) {
  swe::ThackerRun run;
  run.which = to_case(o.example);
  run.spacing = o.dx;
  run.fixed_k = o.k;
  run.gamma = o.gamma;
  run.clamp_to_cfl = !o.no_clamp;
  run.t_end = o.t_end;
  const swe::ErrorReport r = swe::run_thacker(run);
  std::cout << "example " << o.example << " dx " << swe::format_double(r.dx) << " k "
            << swe::format_double(r.k) << '\n'
            << "status " << swe::to_string(r.status) << " steps " << r.steps << " t "
            << swe::format_double(r.t_reached) << '\n'
            << "e_h " << swe::format_double(r.e_h) << '\n'
            << "e_u " << swe::format_double(r.e_u) << '\n'
            << "e_v " << swe::format_double(r.e_v) << '\n';
  return exit_code(r.status);
}

struct ConvergenceOptions {
  int example = 1;
  std::string mode = "spatial";
  bool finest = false;
  std::optional<std::string> out;
};

int cmd_convergence(const ConvergenceOptions& o) {
  swe::ThackerRun base;
  base.which = to_case(o.example);
  std::vector<swe::LadderRung> ladder;
  if (o.mode == "spatial") {
    const double k = o.example == 1 ? pow3(-6) : pow3(-5);
    base.gamma = o.example == 1 ? 18.0 : 12.0;
    const int coarsest = -2;
    const int finest = o.finest ? -6 : (o.example == 1 ? -4 : -3);
    for (int e = coarsest; e >= finest; --e) ladder.push_back({pow3(e), k});
  } else {
    base.gamma = o.example == 1 ? 18.0 : 12.0;
    const int finest = o.finest ? -8 : -6;
    for (int e = -4; e >= finest; --e) ladder.push_back({pow3(-4), pow3(e)});
  }
  const auto table = swe::run_convergence_study(base, ladder);
  if (o.out) {
    std::ofstream f(*o.out);
    if (!f) throw std::runtime_error("cannot open '" + *o.out + "' for writing");
    swe::write_convergence_csv(f, table);
  }
  swe::write_convergence_csv(std::cout, table);
  for (const auto& r : table) {
    if (r.status != swe::RunStatus::Completed) {
      std::cerr << "rung dx=" << swe::format_double(r.dx) << " k=" << swe::format_double(r.k) << " divergent ("
                << swe::to_string(r.status) << " at t=" << swe::format_double(r.t_reached) << ")\n";
    }
  }
  return exit_code(table);
}

swe::Scenario scenario_from(const std::optional<std::string>& config, const std::optional<std::string>& preset) {
  if (config && preset) throw swe::ConfigError(0, "give either --config or --preset");
  if (config) return swe::load_scenario_file(*config);
  if (preset) return swe::logone_scenario(swe::parse_logone_name(*preset));
  throw swe::ConfigError(0, "one of --config or --preset is required");
}

struct RunOptions {
  std::optional<std::string> config;
  std::optional<std::string> preset;
  std::optional<std::string> out;
};

int cmd_run(const RunOptions& o) {
  swe::Scenario s = scenario_from(o.config, o.preset);
  if (o.out) {
    const std::filesystem::path rel = s.output.directory;
    s.output.directory = rel.is_absolute() || rel == "." ? std::filesystem::path(*o.out) : *o.out / rel;
  }
  const swe::RunOutput out = swe::run_scenario(s);
  swe::write_outputs(out, s.output);
  std::cout << "status " << swe::to_string(out.status) << " n " << out.n << " t " << swe::format_double(out.t)
            << '\n';
  if (!out.records.empty()) {
    const swe::RunRecord& r = out.records.back();
    std::cout << "last record n " << r.n << " h_max " << swe::format_double(r.h_max) << " u_max "
              << swe::format_double(r.u_max) << " v_max " << swe::format_double(r.v_max) << '\n';
  }
  std::cout << "outputs in " << s.output.directory.string() << '\n';
  return exit_code(out.status);
}

int cmd_stability_report(const std::string& config) {
  const swe::Scenario s = swe::load_scenario_file(config);
  const swe::FlowState initial = swe::build_initial_state(s);
  swe::Governor governor(s.time.governor, initial, s.physics.g, s.physics.h_eps);
  const swe::StepBound b = governor.propose(initial);
  const swe::FieldMaxima m = swe::field_maxima(initial, s.physics.h_eps);
  std::cout << "grid " << initial.grid.mx << " x " << initial.grid.my << " dx " << swe::format_double(initial.grid.dx)
            << " dy " << swe::format_double(initial.grid.dy) << '\n'
            << "h_max " << swe::format_double(m.h_max) << " u_max " << swe::format_double(m.u_max) << " v_max "
            << swe::format_double(m.v_max) << '\n'
            << "k_cfl " << swe::format_double(b.k_cfl) << '\n'
            << "k_thm1 " << swe::format_double(b.k_thm1) << " (gamma " << swe::format_double(b.gamma) << ")\n"
            << "chosen_k " << swe::format_double(b.chosen_k) << " source " << swe::to_string(b.source) << '\n';
  const double limit = std::min(b.k_cfl, b.k_thm1);
  if (s.time.governor.policy == swe::StepPolicy::Fixed && limit > 0.0) {
    std::cout << "fixed k is " << swe::format_double(b.chosen_k / limit) << " x the tighter bound\n";
  }
  return 0;
}

int cmd_penta_check(int n) {
  const swe::PentaNormReport r = swe::penta_norm_diagnostic(n);
  const bool ok = r.computed_norm <= r.bound + 1e-9;
  std::cout << "n " << n << " norm " << swe::format_double(r.computed_norm) << " bound "
            << swe::format_double(r.bound) << " iterations " << r.iterations << (ok ? " within" : " EXCEEDS")
            << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split explicit/implicit shallow-water solver"};
  app.require_subcommand(1);

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "Run one Thacker benchmark against its exact solution");
  v->add_option("--example", verify.example, "1 (radial) or 2 (planar)")->check(CLI::IsMember({1, 2}));
  v->add_option("--dx", verify.dx, "Target grid spacing")->check(CLI::PositiveNumber);
  v->add_option("--k", verify.k, "Fixed step; omit to use the step governor")->check(CLI::PositiveNumber);
  v->add_option("--gamma", verify.gamma, "Governor parameter in (0, 18]")->check(CLI::Range(1e-12, 18.0));
  v->add_option("--t-end", verify.t_end, "End time; default three periods")->check(CLI::PositiveNumber);
  v->add_flag("--no-clamp", verify.no_clamp, "Do not clamp the governor step to the CFL value");

  ConvergenceOptions conv;
  auto* c = app.add_subcommand("convergence", "Refinement study with ratio 3");
  c->add_option("--example", conv.example, "1 or 2")->required()->check(CLI::IsMember({1, 2}));
  c->add_option("--mode", conv.mode, "spatial or temporal")->check(CLI::IsMember({"spatial", "temporal"}));
  c->add_flag("--finest", conv.finest, "Extend the ladder with the long-running fine rungs");
  c->add_option("--out", conv.out, "Also write the table to this CSV file");

  RunOptions run;
  auto* r = app.add_subcommand("run", "Run a scenario file or a flood preset");
  auto* cfg_opt = r->add_option("--config", run.config, "Scenario file");
  auto* preset_opt = r->add_option("--preset", run.preset, "logone:<wet|dry>:<min|avg|max>");
  cfg_opt->excludes(preset_opt);
  r->add_option("--out", run.out, "Output directory");

  std::string report_config;
  auto* s = app.add_subcommand("stability-report", "Step bounds for a scenario's initial state");
  s->add_option("--config", report_config, "Scenario file")->required();

  int penta_n = 5;
  auto* p = app.add_subcommand("penta-check", "Spectral norm of the fourth-order difference matrix");
  p->add_option("--n", penta_n, "Matrix size")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*v) return cmd_verify(verify);
    if (*c) return cmd_convergence(conv);
    if (*r) return cmd_run(run);
    if (*s) return cmd_stability_report(report_config);
    if (*p) return cmd_penta_check(penta_n);
  } catch (const swe::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
