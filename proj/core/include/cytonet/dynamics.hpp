#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cytonet/interventions.hpp"
#include "cytonet/network_spec.hpp"
#include "cytonet/state.hpp"

namespace cytonet {

/// Clamp arguments seen while evaluating the rate law at one state. Used by
/// the stability analysis to detect non-smooth points.
struct ClampTrace {
  /// Differentiation sum for cells with an origin, production sum for
  /// non-self-multiplicative species. NaN where no clamp applies.
  Eigen::VectorXd inner;
  /// Total proliferation argument for cells under TotalProliferation. NaN
  /// elsewhere.
  Eigen::VectorXd outer;
};

/// Right-hand side of the rate equations. Throws PreconditionError when any
/// component of `x` is negative or the size does not match the spec.
Eigen::VectorXd rhs(const NetworkSpec& spec, const Eigen::VectorXd& x);
Eigen::VectorXd rhs(const NetworkSpec& spec, const Eigen::VectorXd& x, const Forcing& forcing);

/// Same as rhs without the precondition check; writes into `out`.
void rhs_into(const NetworkSpec& spec, const Eigen::VectorXd& x, const Forcing* forcing,
              Eigen::VectorXd& out, ClampTrace* trace = nullptr);

/// Production that survives the clamp for species `i` (before death and
/// forcing). Exactly zero when the clamp argument is negative.
double production(const NetworkSpec& spec, const Eigen::VectorXd& x, std::size_t i);

struct StepControl {
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t record_every = 100;

  void validate() const;
};

/// One Heun (explicit trapezoidal) step followed by projection onto the
/// non-negative orthant. Throws DivergenceError on non-finite output.
State step(const NetworkSpec& spec, const State& s, double dt);
State step(const NetworkSpec& spec, const State& s, double dt, const Forcing& forcing);

/// An event as it was applied during a simulation.
struct EventMarker {
  Event event;
  Eigen::VectorXd before;
  Eigen::VectorXd after;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<EventMarker> events;

  std::size_t size() const noexcept { return times.size(); }
  State at(std::size_t k) const { return State{states[k], times[k]}; }
  State back() const { return State{states.back(), times.back()}; }
};

/// Fixed-step integration from s0 to ctrl.t_end. Steps are split at event
/// times and window edges so every event acts exactly at its timestamp.
/// Samples are recorded every `record_every` grid steps, plus s0 and the
/// final state. A Knockout event alters the spec for the rest of the run.
Trajectory simulate(const NetworkSpec& spec, const State& s0, const StepControl& ctrl,
                    const EventSchedule& events = {});

}  // namespace cytonet
