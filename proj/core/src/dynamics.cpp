#include "cytonet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cytonet/error.hpp"

namespace cytonet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_input(const NetworkSpec& spec, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != spec.size()) {
    throw PreconditionError("state has " + std::to_string(x.size()) + " entries, spec has " +
                            std::to_string(spec.size()));
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0)) {
      throw PreconditionError("state entry " + spec.species[static_cast<std::size_t>(i)].name +
                              " is negative or NaN");
    }
  }
}

void check_forcing(const NetworkSpec& spec, const Forcing& f) {
  const auto n = static_cast<Eigen::Index>(spec.size());
  if (f.inflow.size() != n || f.extra_decay.size() != n) {
    throw PreconditionError("forcing size does not match the spec");
  }
}

// Row i of m times x.
double row_dot(const Eigen::MatrixXd& m, Eigen::Index i, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  const double* col = m.data() + i;
  const Eigen::Index stride = m.rows();
  double s = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) s += col[j * stride] * x[j];
  return s;
}

struct Production {
  double value;
  double inner;
  double outer;
};

Production produce(const NetworkSpec& spec, const Eigen::VectorXd& x, std::size_t i) {
  const auto ei = static_cast<Eigen::Index>(i);
  if (spec.knocked_out[i]) return {0.0, kNaN, kNaN};
  switch (spec.species[i].kind) {
    case SpeciesKind::SelfMultiplicativeCell: {
      const double own = x[ei] * row_dot(spec.w, ei, x);
      double diff = 0.0;
      double inner = kNaN;
      if (const auto& o = spec.origin[i]) {
        inner = x[static_cast<Eigen::Index>(*o)] * row_dot(spec.w1, ei, x);
        diff = std::max(inner, 0.0);
      }
      const double total = own + diff;
      if (spec.clamp == ClampMode::TotalProliferation) return {std::max(total, 0.0), inner, total};
      return {total, inner, kNaN};
    }
    case SpeciesKind::NonSelfMultiplicative: {
      const double s = row_dot(spec.w, ei, x) + row_dot(spec.w2, ei, x);
      return {std::max(s, 0.0), s, kNaN};
    }
    case SpeciesKind::Decaying:
      break;
  }
  return {0.0, kNaN, kNaN};
}

bool finite_vector(const Eigen::VectorXd& x, Eigen::Index* bad) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      *bad = i;
      return false;
    }
  }
  return true;
}

// Heun step with projection of both the predictor and the result. Buffers
// are passed in so the simulation loop does not allocate.
struct Stepper {
  const NetworkSpec* spec;
  Eigen::VectorXd k1, k2, pred;

  explicit Stepper(const NetworkSpec& s)
      : spec(&s),
        k1(static_cast<Eigen::Index>(s.size())),
        k2(static_cast<Eigen::Index>(s.size())),
        pred(static_cast<Eigen::Index>(s.size())) {}

  void advance(Eigen::VectorXd& x, double t, double dt, const Forcing* f) {
    rhs_into(*spec, x, f, k1);
    pred = (x + dt * k1).cwiseMax(0.0);
    rhs_into(*spec, pred, f, k2);
    x += 0.5 * dt * (k1 + k2);
    x = x.cwiseMax(0.0);
    Eigen::Index bad = 0;
    // cwiseMax drops NaN, so the check runs on the unprojected slopes too.
    if (!finite_vector(k1, &bad) || !finite_vector(k2, &bad) || !finite_vector(x, &bad)) {
      throw DivergenceError(spec->species[static_cast<std::size_t>(bad)].name, t + dt);
    }
  }
};

}  // namespace

void rhs_into(const NetworkSpec& spec, const Eigen::VectorXd& x, const Forcing* forcing,
              Eigen::VectorXd& out, ClampTrace* trace) {
  const auto n = static_cast<Eigen::Index>(spec.size());
  out.resize(n);
  if (trace != nullptr) {
    trace->inner = Eigen::VectorXd::Constant(n, kNaN);
    trace->outer = Eigen::VectorXd::Constant(n, kNaN);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto p = produce(spec, x, static_cast<std::size_t>(i));
    double decay = spec.death[i];
    double influx = spec.source[i];
    if (forcing != nullptr) {
      decay += forcing->extra_decay[i];
      influx += forcing->inflow[i];
    }
    out[i] = p.value - decay * x[i] + influx;
    if (trace != nullptr) {
      trace->inner[i] = p.inner;
      trace->outer[i] = p.outer;
    }
  }
}

Eigen::VectorXd rhs(const NetworkSpec& spec, const Eigen::VectorXd& x) {
  check_input(spec, x);
  Eigen::VectorXd out;
  rhs_into(spec, x, nullptr, out);
  return out;
}

Eigen::VectorXd rhs(const NetworkSpec& spec, const Eigen::VectorXd& x, const Forcing& forcing) {
  check_input(spec, x);
  check_forcing(spec, forcing);
  Eigen::VectorXd out;
  rhs_into(spec, x, &forcing, out);
  return out;
}

double production(const NetworkSpec& spec, const Eigen::VectorXd& x, std::size_t i) {
  check_input(spec, x);
  if (i >= spec.size()) throw PreconditionError("species index out of range");
  return produce(spec, x, i).value;
}

void StepControl::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("dt must be a positive number");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw PreconditionError("t_end must be finite and >= 0");
  if (record_every == 0) throw PreconditionError("record_every must be >= 1");
}

State step(const NetworkSpec& spec, const State& s, double dt) {
  return step(spec, s, dt, Forcing::none(static_cast<Eigen::Index>(spec.size())));
}

State step(const NetworkSpec& spec, const State& s, double dt, const Forcing& forcing) {
  check_input(spec, s.x);
  check_forcing(spec, forcing);
  if (!(dt > 0.0)) throw PreconditionError("dt must be > 0");
  Stepper st(spec);
  State out = s;
  st.advance(out.x, s.t, dt, &forcing);
  out.t = s.t + dt;
  return out;
}

Trajectory simulate(const NetworkSpec& spec_in, const State& s0, const StepControl& ctrl,
                    const EventSchedule& events) {
  ctrl.validate();
  check_input(spec_in, s0.x);
  if (ctrl.t_end < s0.t) throw PreconditionError("t_end lies before the initial time");
  for (const auto& e : events.events()) {
    validate_event(spec_in, e);
    if (e.time < s0.t || e.time > ctrl.t_end) {
      throw PreconditionError("event at t=" + std::to_string(e.time) + " lies outside the simulated span");
    }
  }

  NetworkSpec spec = spec_in;
  const auto n = static_cast<Eigen::Index>(spec.size());
  const double t0 = s0.t;
  const double dt = ctrl.dt;
  const auto grid_steps = static_cast<std::size_t>(std::ceil((ctrl.t_end - t0) / dt - 1e-9));
  // Two times closer than this are the same instant.
  const double eps = 1e-9 * dt;

  std::vector<double> breaks;
  for (const auto& e : events.events()) {
    breaks.push_back(e.time);
    if (e.is_window()) breaks.push_back(e.end());
  }
  std::sort(breaks.begin(), breaks.end());

  Trajectory traj;
  Eigen::VectorXd x = s0.x;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (spec.knocked_out[i]) x[static_cast<Eigen::Index>(i)] = 0.0;
  }
  traj.times.push_back(t0);
  traj.states.push_back(x);

  const auto evs = events.events();
  std::size_t next_point = 0;  // first point event (bolus/knockout) not yet applied
  auto apply_points = [&](double t) {
    while (next_point < evs.size() && evs[next_point].time <= t + eps) {
      const auto& e = evs[next_point++];
      if (e.kind == EventKind::Bolus) {
        EventMarker m{e, x, {}};
        x[static_cast<Eigen::Index>(e.species)] += e.magnitude;
        m.after = x;
        traj.events.push_back(std::move(m));
      } else if (e.kind == EventKind::Knockout) {
        EventMarker m{e, x, {}};
        spec = apply_knockout(std::move(spec), e.species);
        x[static_cast<Eigen::Index>(e.species)] = 0.0;
        m.after = x;
        traj.events.push_back(std::move(m));
      } else {
        traj.events.push_back({e, x, x});
      }
    }
  };

  Stepper stepper(spec);
  Forcing forcing = Forcing::none(n);
  std::vector<Event> active;
  auto refresh_forcing = [&](double a, double b) {
    const double mid = 0.5 * (a + b);
    active.clear();
    for (const auto& e : evs) {
      if (e.covers(mid)) active.push_back(e);
    }
    forcing = effective_rates(spec, active);
  };

  double t = t0;
  auto brk = breaks.begin();
  for (std::size_t k = 1; k <= grid_steps; ++k) {
    const double grid_t = std::min(t0 + static_cast<double>(k) * dt, ctrl.t_end);
    while (true) {
      apply_points(t);
      stepper.spec = &spec;
      while (brk != breaks.end() && *brk <= t + eps) ++brk;
      double target = grid_t;
      if (brk != breaks.end() && *brk < grid_t - eps) target = *brk;
      refresh_forcing(t, target);
      stepper.advance(x, t, target - t, &forcing);
      t = target;
      if (target >= grid_t - eps) break;
    }
    t = grid_t;
    if (k % ctrl.record_every == 0 || k == grid_steps) {
      traj.times.push_back(t);
      traj.states.push_back(x);
    }
  }
  // Point events exactly at t_end still act on the final state.
  if (next_point < evs.size() && evs[next_point].time <= t + eps) {
    apply_points(t);
    traj.states.back() = x;
  }
  return traj;
}

}  // namespace cytonet
