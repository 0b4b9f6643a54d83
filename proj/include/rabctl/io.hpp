/**
 * @file io.hpp
 * @brief CSV and plain-text serialization of trajectories and reports.
 *
 * Trajectory CSV: header `t,x,y,z,u,active,r`, active in {0,1}, r left empty
 * before the delay window fills. Sweep CSV: header
 * `K,epsilon,mode,stabilized,target,tail_max_distance,control_effort,max_abs_u`.
 * Floats carry 17 significant digits so doubles round-trip exactly.
 */
#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rabctl/harness.hpp"

namespace rabctl {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kTrajectoryHeader = "t,x,y,z,u,active,r";
inline constexpr std::string_view kSweepHeader =
    "K,epsilon,mode,stabilized,target,tail_max_distance,control_effort,max_abs_u";

/// printf-style %.17g.
std::string format_double(double v);

/// Whole-string parse (optional leading '+'); false on any trailing junk.
bool parse_double(std::string_view s, double& out);

void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

Trajectory read_trajectory_csv(std::istream& in);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

void write_sweep_csv(const SweepReport& report, std::ostream& out);
void write_sweep_csv(const SweepReport& report, const std::filesystem::path& path);

/// `key = value` lines, including the settings echo when present.
std::string format_report(const ConvergenceReport& rep);

void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace rabctl
