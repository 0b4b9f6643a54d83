/**
 * @file config.hpp
 * @brief Flat key=value run configuration.
 *
 * One `key = value` pair per line; `#` starts a comment. Recognised keys:
 * a, b, d, h, x0, y0, z0, t0, t_end, dt, K, epsilon, t_on, mode (literal|euler),
 * tau, capture_radius, tail, out_csv, out_report. Absent keys take the
 * defaults below; unknown or repeated keys are rejected.
 */
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rabctl/dynamics.hpp"
#include "rabctl/harness.hpp"
#include "rabctl/integrator.hpp"
#include "rabctl/predictive_control.hpp"

namespace rabctl {

struct RunConfig {
  Params params = Params::classic();
  State s0 = State(1.5, -1.25, 3.5);
  TimeGrid grid{0.0, 200.0, 0.1};
  ControllerConfig controller{};
  AnalysisOptions analysis{};
  std::string out_csv = "trajectory.csv";
  std::string out_report = "report.txt";

  /// Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError (line-numbered for syntax problems).
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config; numbers written with 17 significant digits.
std::string serialize_config(const RunConfig& cfg);

}  // namespace rabctl
