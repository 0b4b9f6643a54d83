/**
 * @file harness.hpp
 * @brief Controlled/uncontrolled runs, convergence measurement and (K, epsilon) sweeps.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rabctl/dynamics.hpp"
#include "rabctl/integrator.hpp"
#include "rabctl/predictive_control.hpp"

namespace rabctl {

struct Sample {
  double t = 0.0;
  State state = State::Zero();
  double u = 0.0;
  bool active = false;
  /// Empty until the delay window has filled (and always for uncontrolled runs).
  std::optional<double> r;
};

/** @brief Grid-ordered samples; u is zero whenever active is false. */
struct Trajectory {
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

struct AnalysisOptions {
  /// Length of the final time window examined for capture.
  double tail = 20.0;
  double capture_radius = 0.5;

  friend bool operator==(const AnalysisOptions&, const AnalysisOptions&) = default;
};

/// Echo of how a run was produced; attached to reports by the caller.
struct RunSettings {
  std::optional<ControllerConfig> controller;
  TimeGrid grid;
  std::string norm = "euclidean";
  std::string gate_evaluation = "step_start";
};

struct ConvergenceReport {
  std::size_t target_index = 0;
  State target = State::Zero();
  double tail_max_distance = 0.0;
  double tail_mean_distance = 0.0;
  bool stabilized = false;
  /// Trapezoid-rule integral of |u| over the whole run.
  double control_effort = 0.0;
  double max_abs_u = 0.0;
  std::size_t active_samples = 0;
  std::size_t tail_samples = 0;
  AnalysisOptions analysis;
  std::optional<RunSettings> settings;
};

/// "origin", "positive" (x > 0) or "negative", following EquilibriumSet order.
std::string equilibrium_label(std::size_t index);

Trajectory run_uncontrolled(const Params& p, const State& s0, const TimeGrid& grid);

/**
 * @brief Runs the gated closed loop.
 *
 * The gate is evaluated once per step from the state at the start of the step
 * and held for all four RK4 stages; while active the field carries u on the
 * z-equation, otherwise the open-loop field is used.
 */
Trajectory run_controlled(const Params& p, const State& s0, const TimeGrid& grid,
                          const ControllerConfig& cfg);

/// Measures the tail of @p traj against the nearest equilibrium (by tail mean).
ConvergenceReport convergence_report(const Trajectory& traj, const EquilibriumSet& eqs,
                                     const AnalysisOptions& opts = {});

struct SweepCell {
  double K = 0.0;
  double epsilon = 0.0;
  PredictionMode mode = PredictionMode::DerivativeAsPrediction;
  bool in_admissible_interval = false;
  std::optional<ConvergenceReport> report;
  /// Set when the cell's run failed; the sweep itself carries on.
  std::string error;
};

/** @brief Cells ordered mode-major, then K, then epsilon. */
struct SweepReport {
  std::vector<double> K_values;
  std::vector<double> eps_values;
  std::vector<PredictionMode> modes;
  std::vector<SweepCell> cells;

  const SweepCell& at(std::size_t mode, std::size_t k, std::size_t e) const {
    return cells[(mode * K_values.size() + k) * eps_values.size() + e];
  }
};

/// One controlled run plus report per cell. @p threads == 0 picks hardware concurrency.
SweepReport sweep(const Params& p, const State& s0, const TimeGrid& grid,
                  const std::vector<double>& K_list, const std::vector<double>& eps_list,
                  const ControllerConfig& base_cfg, const AnalysisOptions& opts = {},
                  std::vector<PredictionMode> modes = {}, unsigned threads = 0);

}  // namespace rabctl
