#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adiabatic/lab/model_file.hpp"
#include "adiabatic/lab/report.hpp"

namespace adiabatic::lab {

// Exit codes of adiabatic-lab.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitIntegration = 3;
inline constexpr int kExitDegeneracy = 4;
inline constexpr int kExitContinuation = 5;
inline constexpr int kExitIo = 10;

/// Flags shared by every subcommand. Unset optionals fall back to the model
/// file, then to the defaults below.
struct CommandOptions {
  std::string command_line;
  std::string model_path;

  std::optional<double> mu, delta, x, eps;
  std::vector<double> times{0.0};
  double t_end = 0.0;
  double tol = 1e-10;
  double start_threshold = 1e-8;
  std::size_t max_steps = 50'000'000;
  std::size_t order = 30;
  std::size_t jet_order = 2;
  std::size_t terms = 60;
  std::string eps_grid = "0.5:0.5:4";

  std::uint64_t seed = 0;
  std::size_t levels = 4;
  double gap = 1.0;
  double vscale = 1.0;

  bool timing = false;
};

struct EpsGrid {
  double start;
  double factor;
  std::size_t count;
  std::vector<double> values() const;
};

/// Parses "start:factor:count".
EpsGrid parse_eps_grid(const std::string& text);

RunReport run_two_state(const std::string& subcommand, const CommandOptions& opts);

/// `gen` is handled separately because its output is a model file, not a report.
RunReport run_n_state(const std::string& subcommand, const CommandOptions& opts);

/// Model file text produced by `n-state gen`.
std::string generate_model_text(const CommandOptions& opts);

/// Maps a library exception to the exit code contract.
int exit_code_for(const std::exception& e);

}  // namespace adiabatic::lab
