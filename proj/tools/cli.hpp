#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "swid/em.hpp"
#include "swid/metrics.hpp"
#include "swid/simulator.hpp"

namespace swid::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kDegraded = 3, kValidation = 4 };

/// Parses argv (argv[0] is the program name) and runs one subcommand. Progress
/// and summaries go to `out` as JSON lines, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Identification and evaluation at one benchmark noise level.
struct SweepSettings {
  Index T = 1000;               ///< training and evaluation trajectory length
  std::uint64_t data_seed = 1;  ///< training trajectory seed
  int K = 2;
  int restarts = 3;
  EmConfig em;
  int eval_trajectories = 10;
  std::uint64_t eval_seed = 1000;  ///< evaluation trajectories use eval_seed + i
};

struct SweepCell {
  double noise_var = 0.0;
  EmResult fit;
  EvalResult train;  ///< one-step evaluation on the training trajectory
  std::vector<double> eval_mse;
  std::vector<double> eval_bfr;
  std::vector<double> eval_mode_match;
  double median_mse = 0.0;
  double median_bfr = 0.0;
  double median_mode_match = 0.0;
};

SweepCell sweep_cell(double noise_var, const SweepSettings& settings);

double median(std::vector<double> v);

}  // namespace swid::cli
