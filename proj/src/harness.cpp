#include "rabctl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace rabctl {

std::string equilibrium_label(std::size_t index) {
  switch (index) {
    case 0: return "origin";
    case 1: return "positive";
    case 2: return "negative";
    default: return "unknown";
  }
}

Trajectory run_uncontrolled(const Params& p, const State& s0, const TimeGrid& grid) {
  p.validate();
  grid.validate();
  Trajectory traj;
  traj.samples.reserve(grid.steps() + 1);
  const auto field = [&p](double, const State& s) { return vector_field(p, s); };
  integrate(field, s0, grid, [&traj](std::size_t, double t, const State& s) {
    traj.samples.push_back({t, s, 0.0, false, std::nullopt});
  });
  return traj;
}

Trajectory run_controlled(const Params& p, const State& s0, const TimeGrid& grid,
                          const ControllerConfig& cfg) {
  p.validate();
  grid.validate();
  cfg.validate();
  DelayLine history(cfg.delay_samples(grid.dt));

  Trajectory traj;
  traj.samples.reserve(grid.steps() + 1);
  bool active = false;

  const auto field = [&](double, const State& s) {
    return active ? controlled_vector_field(p, s, cfg) : vector_field(p, s);
  };
  const auto observer = [&](std::size_t, double t, const State& s) {
    const GateState gate = activation_gate(history, t, s, cfg);
    history.push(s);
    active = gate.active;
    const double u = active ? control_input(p, s, cfg) : 0.0;
    traj.samples.push_back({t, s, u, active, gate.r});
  };
  integrate(field, s0, grid, observer);
  return traj;
}

ConvergenceReport convergence_report(const Trajectory& traj, const EquilibriumSet& eqs,
                                     const AnalysisOptions& opts) {
  if (traj.empty()) throw std::invalid_argument("convergence_report: empty trajectory");
  if (eqs.points.empty()) throw std::invalid_argument("convergence_report: no equilibria");
  if (!(opts.tail > 0.0) || !(opts.capture_radius > 0.0)) {
    throw std::invalid_argument("convergence_report: tail and capture_radius must be positive");
  }
  const double t_first = traj.samples.front().t;
  const double t_last = traj.samples.back().t;
  if (!(opts.tail < t_last - t_first)) {
    throw std::invalid_argument("convergence_report: tail window must be shorter than the run");
  }

  const double t_start = t_last - opts.tail;
  const auto first_tail = std::find_if(traj.samples.begin(), traj.samples.end(),
                                       [&](const Sample& s) { return s.t >= t_start - 1e-9; });
  const std::size_t n_tail = static_cast<std::size_t>(traj.samples.end() - first_tail);
  if (n_tail == 0) throw std::invalid_argument("convergence_report: empty tail window");

  ConvergenceReport rep;
  rep.analysis = opts;
  rep.tail_samples = n_tail;

  State mean = State::Zero();
  for (auto it = first_tail; it != traj.samples.end(); ++it) mean += it->state;
  mean /= static_cast<double>(n_tail);

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eqs.points.size(); ++i) {
    const double dist = (mean - eqs.points[i]).norm();
    if (dist < best) {
      best = dist;
      rep.target_index = i;
    }
  }
  rep.target = eqs.points[rep.target_index];

  double sum = 0.0;
  for (auto it = first_tail; it != traj.samples.end(); ++it) {
    const double dist = (it->state - rep.target).norm();
    rep.tail_max_distance = std::max(rep.tail_max_distance, dist);
    sum += dist;
  }
  rep.tail_mean_distance = sum / static_cast<double>(n_tail);
  rep.stabilized = rep.tail_max_distance <= opts.capture_radius;

  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const Sample& s = traj.samples[i];
    rep.max_abs_u = std::max(rep.max_abs_u, std::abs(s.u));
    if (s.active) ++rep.active_samples;
    if (i + 1 < traj.samples.size()) {
      const Sample& n = traj.samples[i + 1];
      rep.control_effort += 0.5 * (n.t - s.t) * (std::abs(s.u) + std::abs(n.u));
    }
  }
  return rep;
}

SweepReport sweep(const Params& p, const State& s0, const TimeGrid& grid,
                  const std::vector<double>& K_list, const std::vector<double>& eps_list,
                  const ControllerConfig& base_cfg, const AnalysisOptions& opts,
                  std::vector<PredictionMode> modes, unsigned threads) {
  if (K_list.empty() || eps_list.empty()) {
    throw std::invalid_argument("sweep: K and epsilon lists must be nonempty");
  }
  p.validate();
  grid.validate();
  if (modes.empty()) modes.push_back(base_cfg.mode);

  SweepReport out;
  out.K_values = K_list;
  out.eps_values = eps_list;
  out.modes = modes;
  const GainInterval admissible = admissible_gain_interval(p.d);
  for (const PredictionMode m : modes) {
    for (const double K : K_list) {
      for (const double eps : eps_list) {
        SweepCell cell;
        cell.K = K;
        cell.epsilon = eps;
        cell.mode = m;
        cell.in_admissible_interval = admissible.contains(K);
        out.cells.push_back(std::move(cell));
      }
    }
  }

  const EquilibriumSet eqs = equilibria(p);
  const auto run_cell = [&](SweepCell& cell) {
    ControllerConfig cfg = base_cfg;
    cfg.K = cell.K;
    cfg.epsilon = cell.epsilon;
    cfg.mode = cell.mode;
    try {
      ConvergenceReport rep = convergence_report(run_controlled(p, s0, grid, cfg), eqs, opts);
      rep.settings = RunSettings{cfg, grid};
      cell.report = std::move(rep);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(out.cells.size()));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < out.cells.size(); i = next++) run_cell(out.cells[i]);
      });
    }
  }
  return out;
}

}  // namespace rabctl
