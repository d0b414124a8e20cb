#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

using adiabatic::lab::CommandOptions;

void setup_logging() {
  auto logger = spdlog::stderr_logger_st("adiabatic-lab");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ADIABATIC_LAB_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

void add_common(CLI::App* sub, CommandOptions& o, std::string& format, std::string& out) {
  sub->add_option("--model", o.model_path, "JSON model file");
  sub->add_option("--out", out, "Output file (default: stdout)");
  sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--x", o.x, "Coupling x > 0");
  sub->add_option("--eps", o.eps, "Switching rate eps > 0");
  sub->add_option("--t", o.times, "Evaluation time(s)");
  sub->add_option("--t-end", o.t_end, "End time of ODE evolution");
  sub->add_option("--tol", o.tol, "ODE tolerance");
  sub->add_option("--start-threshold", o.start_threshold, "Coupling/gap ratio at the ODE start time");
  sub->add_option("--max-steps", o.max_steps, "ODE step budget");
  sub->add_option("--order", o.order, "Series truncation order");
  sub->add_option("--jet-order", o.jet_order, "Taylor order in eps");
  sub->add_option("--eps-grid", o.eps_grid, "Geometric eps grid start:factor:count");
  sub->add_flag("--timing", o.timing, "Record wall time in the report (breaks bitwise reproducibility)");
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CommandOptions o;
  std::string format = "csv";
  std::string out;
  for (int i = 0; i < argc; ++i) o.command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Adiabatic switching lab: ODE, Bessel-series and phase-recursion routes for switched perturbations"};
  app.require_subcommand(1);

  auto* two = app.add_subcommand("two-state", "Two-level model");
  two->require_subcommand(1);
  for (const char* name : {"exact", "evolve", "series", "phase", "compare", "sweep-eps"}) {
    auto* sub = two->add_subcommand(name);
    add_common(sub, o, format, out);
    sub->add_option("--mu", o.mu, "Energy offset mu");
    sub->add_option("--delta", o.delta, "Half gap delta > 0");
    sub->add_option("--terms", o.terms, "Bessel series terms");
  }

  auto* nst = app.add_subcommand("n-state", "General N-level model");
  nst->require_subcommand(1);
  for (const char* name : {"dyson", "recursion", "split", "assemble", "evolve", "oracle", "compare"}) {
    add_common(nst->add_subcommand(name), o, format, out);
  }
  auto* gen = nst->add_subcommand("gen", "Write a seeded random Hermitian model file");
  gen->add_option("--seed", o.seed, "Generator seed");
  gen->add_option("--levels", o.levels, "Number of levels");
  gen->add_option("--gap", o.gap, "Minimum level spacing");
  gen->add_option("--vscale", o.vscale, "Perturbation scale");
  gen->add_option("--x", o.x, "Coupling stored in the file");
  gen->add_option("--eps", o.eps, "Switching rate stored in the file");
  gen->add_option("--out", out, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  using namespace adiabatic::lab;
  try {
    if (gen->parsed()) {
      const auto text = generate_model_text(o);
      if (out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw adiabatic::IoError("cannot open '" + out + "' for writing");
        f << text;
        if (!f.flush()) throw adiabatic::IoError("write to '" + out + "' failed");
      }
      return kExitOk;
    }
    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    if (two->parsed()) {
      report = run_two_state(two->get_subcommands().front()->get_name(), o);
    } else {
      report = run_n_state(nst->get_subcommands().front()->get_name(), o);
    }
    if (o.timing) {
      report.timing_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    emit(report, format == "json" ? Format::Json : Format::Csv, out);
    for (const auto& f : report.flags) spdlog::info("{}", f);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "adiabatic-lab: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
