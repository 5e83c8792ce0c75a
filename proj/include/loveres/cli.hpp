#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "loveres/io.hpp"
#include "loveres/types.hpp"

namespace loveres::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kClassViolation = 4 };

struct RunConfig {
  std::string command;  // forward | resonances | invert | recover-mu | check
  io::Json doc;         // effective config, after flag overrides
  std::string base_dir; // relative input paths resolve against it
  std::string out_dir = "out";

  // inputs
  std::string potential, profile, zeros, potential1, potential2;
  std::optional<double> omega, omega1, omega2, mu_tail, x_I;
  int grid_intervals = 2048;

  std::optional<Rectangle> region;
  double tol = 1e-10;
  double radius = 0.0;  // truncation R for invert, half-width of the default region otherwise
  double kernel_K_max = 0.0;
  int kernel_points = 256;
  int check_samples = 100;
  unsigned workers = 0;  // 0: LOVE_RES_WORKERS, else 1
  uint64_t seed = 1;
};

// Throws ConfigError on malformed or inconsistent fields.
RunConfig parse_config(const io::Json& doc, const std::string& base_dir = ".");

struct RunResult {
  int exit_code = kOk;
  std::string stage;
  std::string message;
  std::vector<std::string> files;  // written, in order, manifest last
};

// Never throws; failures are mapped to exit codes.
RunResult run(const RunConfig& cfg);

int exit_code_for(const std::exception& e);

}  // namespace loveres::cli
