#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cytonet/network_spec.hpp"
#include "cytonet/state.hpp"

namespace cytonet {

enum class EventKind : std::uint8_t { Bolus, Infusion, Blockade, Knockout };

std::string_view name(EventKind k) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view text) noexcept;

/// A timed intervention.
///
/// `magnitude` is a dose (concentration) for Bolus, an inflow rate for
/// Infusion and an added first-order removal rate for Blockade. Infusion
/// and Blockade act on the half-open window [time, time + duration).
struct Event {
  EventKind kind = EventKind::Bolus;
  std::size_t species = 0;
  double time = 0.0;
  double duration = 0.0;
  double magnitude = 0.0;

  double end() const noexcept { return time + duration; }
  bool is_window() const noexcept {
    return kind == EventKind::Infusion || kind == EventKind::Blockade;
  }
  bool covers(double t) const noexcept { return is_window() && t >= time && t < end(); }

  friend bool operator==(const Event&, const Event&) = default;
};

/// Throws ValidationError when an event breaks its kind's invariants.
void validate_event(const NetworkSpec& spec, const Event& e);

/// Time-sorted list of events; construction rejects unsorted input.
class EventSchedule {
 public:
  EventSchedule() = default;
  explicit EventSchedule(std::vector<Event> events);

  /// Sorts by time (stable) before building.
  static EventSchedule sorted(std::vector<Event> events);

  std::span<const Event> events() const noexcept { return events_; }
  bool empty() const noexcept { return events_.empty(); }
  std::size_t size() const noexcept { return events_.size(); }

  /// Window events covering `t`.
  std::vector<Event> active_at(double t) const;

 private:
  std::vector<Event> events_;
};

/// Rate modifications from active windows: inflow adds to the rate law,
/// extra_decay adds to the death rate.
struct Forcing {
  Eigen::VectorXd inflow;
  Eigen::VectorXd extra_decay;

  static Forcing none(Eigen::Index n) {
    return Forcing{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  }
};

State apply_bolus(State s, std::size_t species, double dose);

/// Sums the infusion rates and blockade rates of `active` per species.
/// Bolus and Knockout events contribute nothing.
Forcing effective_rates(const NetworkSpec& spec, std::span<const Event> active);

/// Removes every production channel of a mediator and pins it to zero.
/// Outgoing edges are kept. Rejects non-mediator targets.
NetworkSpec apply_knockout(NetworkSpec spec, std::size_t species);

}  // namespace cytonet
