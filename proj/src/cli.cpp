#include "rabctl/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rabctl/config.hpp"
#include "rabctl/dynamics.hpp"
#include "rabctl/errors.hpp"
#include "rabctl/harness.hpp"
#include "rabctl/io.hpp"
#include "rabctl/predictive_control.hpp"

namespace rabctl {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string signed_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%+.10g", v);
  return buf;
}

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string eigen_list(const StabilityVerdict& v) {
  std::string s;
  for (std::size_t i = 0; i < v.eigenvalues.size(); ++i) {
    const auto& l = v.eigenvalues[i];
    if (i) s += ", ";
    s += num(l.real());
    if (l.imag() != 0.0) s += (l.imag() > 0 ? "+" : "-") + num(std::abs(l.imag())) + "i";
  }
  return s;
}

void print_verdict(std::ostream& out, const std::string& label, const StabilityVerdict& v) {
  out << "  " << label << ": eigenvalues {" << eigen_list(v) << "}\n"
      << "    discrete (spectral radius < 1): " << pass_fail(v.discrete_ok)
      << " (rho=" << num(v.spectral_radius) << ")\n"
      << "    continuous (max Re < 0): " << pass_fail(v.continuous_ok)
      << " (max Re=" << signed_num(v.max_real_part) << ")\n"
      << "    gain exists (det(A-I) != 0): " << (v.gain_exists ? "yes" : "no") << '\n';
}

RunConfig config_or_default(const std::string& path) {
  return path.empty() ? RunConfig{} : load_config(path);
}

/// Report text plus the literal offset at the target and the gain admissibility.
std::string full_report(const RunConfig& cfg, const ConvergenceReport& rep) {
  std::string text = format_report(rep);
  const GainInterval gi = admissible_gain_interval(cfg.params.d);
  text += "K_in_admissible_interval = " + std::string(gi.contains(cfg.controller.K) ? "true" : "false") + '\n';
  text += "control_input_at_target = " +
          format_double(control_input(cfg.params, rep.target, cfg.controller)) + '\n';
  return text;
}

void run_and_write(const RunConfig& cfg, std::ostream& out) {
  const Trajectory traj = run_controlled(cfg.params, cfg.s0, cfg.grid, cfg.controller);
  ConvergenceReport rep = convergence_report(traj, equilibria(cfg.params), cfg.analysis);
  rep.settings = RunSettings{cfg.controller, cfg.grid};
  const std::string text = full_report(cfg, rep);
  write_trajectory_csv(traj, std::filesystem::path(cfg.out_csv));
  write_text(text, std::filesystem::path(cfg.out_report));
  out << text;
  out << "trajectory_csv = " << cfg.out_csv << '\n' << "report_file = " << cfg.out_report << '\n';
}

int cmd_equilibria(const std::string& config_path, std::optional<double> K, std::ostream& out) {
  const RunConfig cfg = config_or_default(config_path);
  const Params& p = cfg.params;
  const double gain = K.value_or(cfg.controller.K);
  ControllerConfig literal = cfg.controller;
  literal.K = gain;
  literal.mode = PredictionMode::DerivativeAsPrediction;

  const EquilibriumSet eqs = equilibria(p);
  out << "params: a=" << num(p.a) << " b=" << num(p.b) << " d=" << num(p.d) << " h=" << num(p.h)
      << '\n';
  out << "equilibria: " << eqs.count() << (eqs.degenerate ? " (h^2 <= a*b: origin only)" : "")
      << '\n';
  for (std::size_t i = 0; i < eqs.points.size(); ++i) {
    const State& s = eqs.points[i];
    out << '[' << equilibrium_label(i) << "] (" << num(s(0)) << ", " << num(s(1)) << ", "
        << num(s(2)) << ")  residual=" << num(residual_norm(p, s)) << '\n';
    const Matrix3 A = jacobian(p, s);
    print_verdict(out, "open loop", closed_loop_verdict(A, Matrix3::Zero().eval()));
    print_verdict(out, "closed loop, K=" + num(gain) + " on z",
                  closed_loop_verdict(A, z_gain_matrix(gain)));
    out << "    literal control input at point: u=" << num(control_input(p, s, literal) + 0.0) << '\n';
  }
  return kExitOk;
}

int cmd_gain_check(double d, double K, std::ostream& out) {
  const GainInterval gi = admissible_gain_interval(d);
  const double coeff = closed_loop_scalar_coeff(d, K);
  const StabilityVerdict v = closed_loop_verdict(-d, K);
  out << "d = " << num(d) << '\n'
      << "K = " << num(K) << '\n'
      << "admissible interval: (" << num(gi.lo) << ", " << num(gi.hi) << ")\n"
      << "K in interval: " << (gi.contains(K) ? "yes" : "no") << '\n'
      << "closed-loop z coefficient -d-K(d+1): " << signed_num(coeff) << '\n'
      << "discrete criterion |A+K(A-I)| < 1 (spectral radius): " << pass_fail(v.discrete_ok)
      << " (rho=" << num(v.spectral_radius) << ")\n"
      << "continuous-time criterion (max Re < 0): " << pass_fail(v.continuous_ok) << " ("
      << signed_num(v.max_real_part) << ")\n"
      << "gain exists (det(A-I) != 0): " << (v.gain_exists ? "yes" : "no") << '\n';
  if (v.discrete_ok != v.continuous_ok) {
    out << "note: the criteria disagree. The gain admissibility test treats the linearized "
           "z-equation like a discrete map (|coefficient| < 1), but the controlled system is "
           "a continuous-time ODE, where the perturbation decays only if the coefficient is "
           "negative. With coefficient "
        << signed_num(coeff) << " the z-perturbation "
        << (v.continuous_ok ? "decays in continuous time despite failing the discrete test."
                            : "grows in continuous time despite passing the discrete test.")
        << '\n';
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, std::vector<double> Ks, std::vector<double> eps,
              const std::vector<std::string>& mode_names, const std::string& out_path,
              unsigned threads, std::ostream& out) {
  const RunConfig cfg = config_or_default(config_path);
  std::vector<PredictionMode> modes;
  for (const auto& m : mode_names) {
    const auto pm = parse_prediction_mode(m);
    if (!pm) throw ConfigError("unknown mode '" + m + "' (expected literal or euler)");
    modes.push_back(*pm);
  }
  if (Ks.empty()) Ks = {-0.9, -0.6, -0.3, -0.1};
  if (eps.empty()) eps = {0.1, 0.5};
  for (const double e : eps) {
    if (!(e > 0.0)) throw ConfigError("sweep epsilon values must be positive");
  }

  const SweepReport rep =
      sweep(cfg.params, cfg.s0, cfg.grid, Ks, eps, cfg.controller, cfg.analysis, modes, threads);
  write_sweep_csv(rep, std::filesystem::path(out_path));

  std::size_t stabilized = 0;
  std::size_t failed = 0;
  for (const SweepCell& c : rep.cells) {
    out << "K=" << num(c.K) << " epsilon=" << num(c.epsilon) << " mode=" << to_string(c.mode);
    if (!c.in_admissible_interval) out << " [outside admissible gain interval]";
    if (c.report) {
      out << " stabilized=" << (c.report->stabilized ? "true" : "false")
          << " target=" << equilibrium_label(c.report->target_index)
          << " tail_max_distance=" << num(c.report->tail_max_distance)
          << " active_samples=" << c.report->active_samples;
      if (c.report->stabilized) ++stabilized;
    } else {
      out << " error: " << c.error;
      ++failed;
    }
    out << '\n';
  }
  out << "cells = " << rep.cells.size() << ", stabilized = " << stabilized
      << ", failed = " << failed << '\n'
      << "sweep_csv = " << out_path << '\n';
  return kExitOk;
}

int cmd_reproduce(const std::string& protocol, const std::string& out_dir, std::ostream& out) {
  RunConfig cfg;
  cfg.controller.t_on = (protocol == "fig4") ? 40.0 : 100.0;
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  cfg.out_csv = (dir / (protocol + ".csv")).string();
  cfg.out_report = (dir / (protocol + "_report.txt")).string();
  cfg.validate();
  out << "protocol = " << protocol << '\n';
  run_and_write(cfg, out);
  return kExitOk;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Predictive chaos control of the Rabinovich system", "rabctl"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<double> eq_K;
  auto* eq = app.add_subcommand("equilibria", "List equilibria with open/closed-loop stability");
  eq->add_option("--config", config_path, "Config file (key = value)");
  eq->add_option("--K", eq_K, "Gain for the closed-loop verdict (default: config K)");

  std::string out_csv;
  std::string out_report;
  auto* sim = app.add_subcommand("simulate", "Run one controlled simulation");
  sim->add_option("--config", config_path, "Config file (key = value)");
  sim->add_option("--out-csv", out_csv, "Override out_csv");
  sim->add_option("--out-report", out_report, "Override out_report");

  double gc_d = 1.0;
  double gc_K = -0.6;
  auto* gc = app.add_subcommand("gain-check", "Gain interval and stability criteria for (d, K)");
  gc->add_option("--d", gc_d, "Parameter d")->capture_default_str();
  gc->add_option("--K", gc_K, "Gain K")->capture_default_str();

  std::vector<double> sw_K;
  std::vector<double> sw_eps;
  std::vector<std::string> sw_modes{"literal", "euler"};
  std::string sw_out = "sweep.csv";
  unsigned sw_threads = 0;
  auto* sw = app.add_subcommand("sweep", "Sweep (K, epsilon, mode) and write a CSV summary");
  sw->add_option("--config", config_path, "Config file (key = value)");
  sw->add_option("--K", sw_K, "Gains (default -0.9,-0.6,-0.3,-0.1)")->delimiter(',');
  sw->add_option("--eps", sw_eps, "Neighborhood radii (default 0.1,0.5)")->delimiter(',');
  sw->add_option("--modes", sw_modes, "Prediction modes")->delimiter(',')->capture_default_str();
  sw->add_option("--out", sw_out, "Sweep CSV path")->capture_default_str();
  sw->add_option("--threads", sw_threads, "Worker threads (0 = hardware)");

  std::string protocol;
  std::string out_dir = ".";
  auto* rep = app.add_subcommand("reproduce", "Run a preset protocol: fig4 (t_on=40) or fig5 (t_on=100)");
  rep->add_option("protocol", protocol, "fig4 or fig5")
      ->required()
      ->check(CLI::IsMember({"fig4", "fig5"}));
  rep->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (eq->parsed()) return cmd_equilibria(config_path, eq_K, out);
    if (sim->parsed()) {
      RunConfig cfg = config_or_default(config_path);
      if (!out_csv.empty()) cfg.out_csv = out_csv;
      if (!out_report.empty()) cfg.out_report = out_report;
      run_and_write(cfg, out);
      return kExitOk;
    }
    if (gc->parsed()) return cmd_gain_check(gc_d, gc_K, out);
    if (sw->parsed()) return cmd_sweep(config_path, sw_K, sw_eps, sw_modes, sw_out, sw_threads, out);
    if (rep->parsed()) return cmd_reproduce(protocol, out_dir, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace rabctl
