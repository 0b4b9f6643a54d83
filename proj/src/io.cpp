#include "rabctl/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace rabctl {

std::string format_double(double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void check_written(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto p = line.find(sep, start);
    fields.push_back(line.substr(start, p == std::string_view::npos ? p : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return fields;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << kTrajectoryHeader << '\n';
  for (const Sample& s : traj.samples) {
    out << format_double(s.t) << ',' << format_double(s.state(0)) << ','
        << format_double(s.state(1)) << ',' << format_double(s.state(2)) << ','
        << format_double(s.u) << ',' << (s.active ? '1' : '0') << ',';
    if (s.r) out << format_double(*s.r);
    out << '\n';
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_trajectory_csv(traj, out);
  check_written(out, path);
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("trajectory CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader) throw IoError("unexpected trajectory CSV header: '" + line + "'");

  Trajectory traj;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    const auto bad = [&](const std::string& what) {
      return IoError("trajectory CSV line " + std::to_string(line_no) + ": " + what);
    };
    if (f.size() != 7) throw bad("expected 7 fields");
    Sample s;
    double x = 0, y = 0, z = 0;
    if (!parse_double(f[0], s.t) || !parse_double(f[1], x) || !parse_double(f[2], y) ||
        !parse_double(f[3], z) || !parse_double(f[4], s.u)) {
      throw bad("malformed number");
    }
    s.state = State(x, y, z);
    if (f[5] == "1") {
      s.active = true;
    } else if (f[5] != "0") {
      throw bad("active must be 0 or 1");
    }
    if (!f[6].empty()) {
      double r = 0;
      if (!parse_double(f[6], r)) throw bad("malformed r");
      s.r = r;
    }
    traj.samples.push_back(s);
  }
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return read_trajectory_csv(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_sweep_csv(const SweepReport& report, std::ostream& out) {
  out << kSweepHeader << '\n';
  for (const SweepCell& c : report.cells) {
    out << format_double(c.K) << ',' << format_double(c.epsilon) << ',' << to_string(c.mode)
        << ',';
    if (c.report) {
      const ConvergenceReport& r = *c.report;
      out << (r.stabilized ? '1' : '0') << ',' << equilibrium_label(r.target_index) << ','
          << format_double(r.tail_max_distance) << ',' << format_double(r.control_effort) << ','
          << format_double(r.max_abs_u);
    } else {
      out << ",error,,,";
    }
    out << '\n';
  }
}

void write_sweep_csv(const SweepReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_sweep_csv(report, out);
  check_written(out, path);
}

std::string format_report(const ConvergenceReport& rep) {
  std::ostringstream o;
  const auto put = [&o](const char* k, double v) { o << k << " = " << format_double(v) << '\n'; };
  o << "# convergence report\n";
  if (rep.settings) {
    const RunSettings& s = *rep.settings;
    if (s.controller) {
      const ControllerConfig& c = *s.controller;
      o << "mode = " << to_string(c.mode) << '\n';
      put("K", c.K);
      put("epsilon", c.epsilon);
      put("t_on", c.t_on);
      put("tau", c.tau);
      o << "controlled_component = z\n";
    } else {
      o << "mode = uncontrolled\n";
    }
    put("t0", s.grid.t0);
    put("t_end", s.grid.t_end);
    put("dt", s.grid.dt);
    o << "norm = " << s.norm << '\n';
    o << "gate_evaluation = " << s.gate_evaluation << '\n';
  }
  put("tail", rep.analysis.tail);
  put("capture_radius", rep.analysis.capture_radius);
  o << "target = " << equilibrium_label(rep.target_index) << '\n';
  o << "target_state = " << format_double(rep.target(0)) << ',' << format_double(rep.target(1))
    << ',' << format_double(rep.target(2)) << '\n';
  put("tail_max_distance", rep.tail_max_distance);
  put("tail_mean_distance", rep.tail_mean_distance);
  o << "tail_samples = " << rep.tail_samples << '\n';
  o << "stabilized = " << (rep.stabilized ? "true" : "false") << '\n';
  put("control_effort", rep.control_effort);
  put("max_abs_u", rep.max_abs_u);
  o << "active_samples = " << rep.active_samples << '\n';
  return o.str();
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << text;
  check_written(out, path);
}

}  // namespace rabctl
