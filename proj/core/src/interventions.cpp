#include "cytonet/interventions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cytonet/error.hpp"

namespace cytonet {

std::string_view name(EventKind k) noexcept {
  switch (k) {
    case EventKind::Bolus:
      return "bolus";
    case EventKind::Infusion:
      return "infusion";
    case EventKind::Blockade:
      return "blockade";
    case EventKind::Knockout:
      return "knockout";
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view text) noexcept {
  for (auto k : {EventKind::Bolus, EventKind::Infusion, EventKind::Blockade, EventKind::Knockout}) {
    if (name(k) == text) return k;
  }
  return std::nullopt;
}

void validate_event(const NetworkSpec& spec, const Event& e) {
  const std::string what = std::string(name(e.kind)) + " event";
  if (e.species >= spec.size()) throw ValidationError(what + " targets an unknown species");
  const auto& target = spec.species[e.species].name;
  if (!std::isfinite(e.time) || e.time < 0.0) {
    throw ValidationError(what + " on " + target + " needs a finite time >= 0");
  }
  if (!std::isfinite(e.duration) || !std::isfinite(e.magnitude)) {
    throw ValidationError(what + " on " + target + " has a non-finite field");
  }
  switch (e.kind) {
    case EventKind::Bolus:
      if (!(e.magnitude > 0.0)) throw ValidationError("bolus dose on " + target + " must be > 0");
      if (e.duration != 0.0) throw ValidationError("bolus on " + target + " cannot have a duration");
      break;
    case EventKind::Infusion:
    case EventKind::Blockade:
      if (!(e.duration > 0.0)) throw ValidationError(what + " on " + target + " needs a duration > 0");
      if (!(e.magnitude > 0.0)) throw ValidationError(what + " rate on " + target + " must be > 0");
      break;
    case EventKind::Knockout:
      if (!is_mediator(spec.species[e.species].role)) {
        throw ValidationError("knockout target " + target + " is not a mediator");
      }
      if (e.duration != 0.0) throw ValidationError("knockout of " + target + " cannot have a duration");
      break;
  }
}

EventSchedule::EventSchedule(std::vector<Event> events) : events_(std::move(events)) {
  const bool ordered = std::is_sorted(events_.begin(), events_.end(),
                                      [](const Event& a, const Event& b) { return a.time < b.time; });
  if (!ordered) throw PreconditionError("event schedule is not sorted by time");
}

EventSchedule EventSchedule::sorted(std::vector<Event> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.time < b.time; });
  return EventSchedule(std::move(events));
}

std::vector<Event> EventSchedule::active_at(double t) const {
  std::vector<Event> out;
  for (const auto& e : events_) {
    if (e.covers(t)) out.push_back(e);
  }
  return out;
}

State apply_bolus(State s, std::size_t species, double dose) {
  if (species >= static_cast<std::size_t>(s.x.size())) {
    throw PreconditionError("bolus targets an unknown species");
  }
  if (!(dose > 0.0)) throw PreconditionError("bolus dose must be > 0");
  s.x[static_cast<Eigen::Index>(species)] += dose;
  return s;
}

Forcing effective_rates(const NetworkSpec& spec, std::span<const Event> active) {
  auto f = Forcing::none(static_cast<Eigen::Index>(spec.size()));
  for (const auto& e : active) {
    if (e.species >= spec.size()) throw PreconditionError("event targets an unknown species");
    const auto i = static_cast<Eigen::Index>(e.species);
    if (e.kind == EventKind::Infusion) f.inflow[i] += e.magnitude;
    if (e.kind == EventKind::Blockade) f.extra_decay[i] += e.magnitude;
  }
  return f;
}

NetworkSpec apply_knockout(NetworkSpec spec, std::size_t species) {
  if (species >= spec.size()) throw PreconditionError("knockout targets an unknown species");
  if (!is_mediator(spec.species[species].role)) {
    throw PreconditionError("knockout target " + spec.species[species].name + " is not a mediator");
  }
  const auto i = static_cast<Eigen::Index>(species);
  spec.w.row(i).setZero();
  spec.w1.row(i).setZero();
  spec.w2.row(i).setZero();
  spec.source[i] = 0.0;
  spec.knocked_out[species] = true;
  return spec;
}

}  // namespace cytonet
