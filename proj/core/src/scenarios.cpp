#include "cytonet/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "cytonet/error.hpp"

namespace cytonet {

namespace {

std::size_t canonical(Species s) { return index(s); }

Event bolus(Species s, double dose) {
  return {EventKind::Bolus, canonical(s), defaults::kEventTime, 0.0, dose};
}

Event window(EventKind k, Species s, double duration, double rate) {
  return {k, canonical(s), defaults::kEventTime, duration, rate};
}

// Horizon shared by the builtin protocols.
constexpr double kBuiltinHorizon = defaults::kEventTime + 300.0;

Scenario make(std::string name, NamedState init, std::vector<Event> events, ExpectedOutcome expected) {
  Scenario sc;
  sc.name = std::move(name);
  sc.init = init;
  sc.events = std::move(events);
  sc.horizon = kBuiltinHorizon;
  sc.expected = expected;
  return sc;
}

bool heals(const ScenarioResult& r) { return r.final_label == Phenotype::TH2 && r.final_label_stable; }

// Index in `to` of the species of `from` at index i (first of its role).
std::size_t remap_index(const NetworkSpec& from, const NetworkSpec& to, std::size_t i) {
  if (auto j = to.find(from.species[i].name)) return *j;
  return to.at(from.species[i].role);
}

}  // namespace

std::string_view name(ExpectedOutcome e) noexcept {
  switch (e) {
    case ExpectedOutcome::EndsTH1:
      return "ends_th1";
    case ExpectedOutcome::EndsTH2:
      return "ends_th2";
    case ExpectedOutcome::Unconstrained:
      return "unconstrained";
  }
  return "?";
}

std::optional<ExpectedOutcome> parse_expected_outcome(std::string_view text) noexcept {
  for (auto e : {ExpectedOutcome::EndsTH1, ExpectedOutcome::EndsTH2, ExpectedOutcome::Unconstrained}) {
    if (name(e) == text) return e;
  }
  return std::nullopt;
}

double Scenario::last_event_time() const noexcept {
  double t = 0.0;
  for (const auto& e : events) t = std::max(t, e.time);
  return t;
}

void validate_scenario(const NetworkSpec& spec, const Scenario& sc) {
  if (sc.name.empty()) throw ValidationError("scenario needs a name");
  if (!std::isfinite(sc.horizon) || !(sc.horizon > 0.0)) {
    throw ValidationError("scenario " + sc.name + ": horizon must be a positive number");
  }
  for (const auto& e : sc.events) validate_event(spec, e);
  if (sc.horizon < sc.last_event_time() + kSettlingMargin) {
    throw ValidationError("scenario " + sc.name + ": horizon must reach at least " +
                          std::to_string(kSettlingMargin) + " past the last event");
  }
  if (const auto* v = std::get_if<Eigen::VectorXd>(&sc.init)) {
    if (static_cast<std::size_t>(v->size()) != spec.size()) {
      throw ValidationError("scenario " + sc.name + ": initial state has the wrong size");
    }
    if (!is_nonnegative(*v) || !v->allFinite()) {
      throw ValidationError("scenario " + sc.name + ": initial state must be finite and non-negative");
    }
  }
}

ScenarioContext ScenarioContext::prepare(NetworkSpec spec) {
  require_valid(spec);
  auto cert = bistability_certificate(spec);
  return ScenarioContext{std::move(spec), std::move(cert)};
}

Eigen::VectorXd initial_state(const ScenarioContext& ctx, const InitialCondition& init) {
  Eigen::VectorXd x;
  if (const auto* named = std::get_if<NamedState>(&init)) {
    x = *named == NamedState::TH1 ? ctx.steady.th1.state.x : ctx.steady.th2.state.x;
  } else {
    x = std::get<Eigen::VectorXd>(init);
  }
  if (static_cast<std::size_t>(x.size()) != ctx.spec.size()) {
    throw PreconditionError("initial state does not match the spec");
  }
  for (std::size_t i = 0; i < ctx.spec.size(); ++i) {
    if (ctx.spec.knocked_out[i]) x[static_cast<Eigen::Index>(i)] = 0.0;
  }
  return x;
}

bool outcome_matches(ExpectedOutcome expected, Phenotype final_label, bool stable) noexcept {
  switch (expected) {
    case ExpectedOutcome::EndsTH1:
      return stable && final_label == Phenotype::TH1;
    case ExpectedOutcome::EndsTH2:
      return stable && final_label == Phenotype::TH2;
    case ExpectedOutcome::Unconstrained:
      return true;
  }
  return false;
}

ScenarioResult run_scenario(const ScenarioContext& ctx, const Scenario& sc, const RunOptions& options) {
  validate_scenario(ctx.spec, sc);
  if (!(options.stable_fraction > 0.0 && options.stable_fraction <= 1.0)) {
    throw PreconditionError("stable_fraction must lie in (0, 1]");
  }
  StepControl ctrl;
  ctrl.dt = options.dt;
  ctrl.t_end = sc.horizon;
  ctrl.record_every = options.record_every;

  ScenarioResult r;
  r.name = sc.name;
  r.expected = sc.expected;
  r.trajectory = simulate(ctx.spec, State{initial_state(ctx, sc.init), 0.0}, ctrl,
                          EventSchedule::sorted(sc.events));
  // A knockout event changes the roster's live set; classification only
  // reads concentrations, so the original spec serves.
  r.labels.reserve(r.trajectory.size());
  for (const auto& x : r.trajectory.states) r.labels.push_back(classify(ctx.spec, x, options.dominance_ratio));
  r.final_label = r.labels.back();
  const double from = sc.horizon * (1.0 - options.stable_fraction);
  r.final_label_stable = true;
  for (std::size_t k = 0; k < r.labels.size(); ++k) {
    if (r.trajectory.times[k] >= from && r.labels[k] != r.final_label) r.final_label_stable = false;
  }
  r.passed = outcome_matches(sc.expected, r.final_label, r.final_label_stable);
  return r;
}

std::vector<Scenario> builtin_scenarios() {
  using namespace defaults;
  using S = Species;
  using K = EventKind;
  using O = ExpectedOutcome;
  const auto heal = bolus(S::Antigen, kHealingAntigen);
  std::vector<Scenario> out;
  out.push_back(make("baseline", NamedState::TH2, {}, O::EndsTH2));
  out.push_back(make("adoptive_transfer", NamedState::TH2, {bolus(S::TH1id, kAdoptiveTransferDose)}, O::EndsTH1));
  out.push_back(make("active_immunization", NamedState::TH2,
                     {bolus(S::Antigen, kImmunizationAntigen),
                      window(K::Infusion, S::CytC, kAdjuvantDuration, kAdjuvantRate)},
                     O::EndsTH1));
  out.push_back(make("free_antigen_heal", NamedState::TH1, {heal}, O::EndsTH2));
  out.push_back(make("antigen_plus_il4", NamedState::TH1,
                     {heal, window(K::Infusion, S::CytB, kIl4Duration, kIl4ModerateRate)}, O::EndsTH1));
  out.push_back(make("il4_high_dose", NamedState::TH1,
                     {heal, window(K::Infusion, S::CytB, kIl4Duration, kIl4HighRate)}, O::EndsTH2));
  out.push_back(make("antigen_plus_anti_il4", NamedState::TH1,
                     {heal, window(K::Blockade, S::CytB, kAntiIl4Duration, kAntiIl4Rate)}, O::EndsTH1));
  out.push_back(make("th1_pulse_heal", NamedState::TH1,
                     {window(K::Infusion, S::CytA, kTh1PulseDuration, kTh1PulseRate)}, O::EndsTH2));
  out.push_back(make("th1_continuous", NamedState::TH1,
                     {window(K::Infusion, S::CytA, kBuiltinHorizon - kEventTime, kTh1ContinuousRate)},
                     O::EndsTH1));
  out.push_back(make("subthreshold_transfer", NamedState::TH2,
                     {bolus(S::TH1id, kSubthresholdFraction * kAdoptiveTransferDose)}, O::EndsTH2));
  return out;
}

std::optional<Scenario> find_builtin_scenario(std::string_view name) {
  for (auto& sc : builtin_scenarios()) {
    if (sc.name == name) return sc;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Dose-response

std::optional<ScanParameter> parse_scan_parameter(const NetworkSpec& spec, const Scenario& sc,
                                                  std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    std::size_t idx = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, idx);
    if (ec != std::errc{} || ptr != end || idx >= sc.events.size()) return std::nullopt;
    return ScanParameter{idx};
  }
  const auto kind = parse_event_kind(text.substr(0, colon));
  const auto species = spec.find(text.substr(colon + 1));
  if (!kind || !species) return std::nullopt;
  for (std::size_t i = 0; i < sc.events.size(); ++i) {
    if (sc.events[i].kind == *kind && sc.events[i].species == *species) return ScanParameter{i};
  }
  return std::nullopt;
}

std::size_t DoseResponse::boundary_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].final_label != points[i - 1].final_label) ++n;
  }
  return n;
}

std::optional<std::pair<double, double>> DoseResponse::threshold_bracket() const noexcept {
  if (boundary_count() != 1) return std::nullopt;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].final_label != points[i - 1].final_label) return std::pair{points[i - 1].dose, points[i].dose};
  }
  return std::nullopt;
}

double DoseResponse::top_decade_variation() const {
  if (points.empty()) throw PreconditionError("empty dose response");
  const double top = points.back().dose;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& p : points) {
    if (p.dose < top / 10.0 * (1.0 - 1e-12)) continue;
    lo = std::min(lo, p.response);
    hi = std::max(hi, p.response);
    sum += p.response;
    ++n;
  }
  const double mean = std::abs(sum / static_cast<double>(n));
  if (hi == lo) return 0.0;
  return (hi - lo) / std::max(mean, 1e-300);
}

Scenario with_magnitude(Scenario sc, ScanParameter p, double magnitude) {
  if (p.event_index >= sc.events.size()) throw PreconditionError("scan parameter names no event");
  sc.events[p.event_index].magnitude = magnitude;
  return sc;
}

namespace {

DosePoint run_point(const ScenarioContext& ctx, const Scenario& sc, ScanParameter p, double dose,
                    const RunOptions& options) {
  const auto r = run_scenario(ctx, with_magnitude(sc, p, dose), options);
  const auto& x = r.trajectory.states.back();
  return {dose, r.final_label,
          role_total(ctx.spec, x, Species::CytA) - role_total(ctx.spec, x, Species::CytB)};
}

Phenotype label_at(const ScenarioContext& ctx, const Scenario& sc, ScanParameter p, double dose,
                   const RunOptions& options) {
  return run_scenario(ctx, with_magnitude(sc, p, dose), options).final_label;
}

}  // namespace

DoseResponse dose_scan(const ScenarioContext& ctx, const Scenario& sc, ScanParameter p,
                       const std::vector<double>& grid, const RunOptions& options,
                       std::size_t workers) {
  if (grid.size() < 3) throw PreconditionError("dose grid needs at least three points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw PreconditionError("dose grid must be non-negative and strictly increasing");
    }
  }
  with_magnitude(sc, p, grid.front());
  validate_scenario(ctx.spec, sc);

  DoseResponse dr;
  dr.parameter = p;
  dr.points.resize(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  const std::size_t n_workers = std::clamp<std::size_t>(workers, 1, grid.size());
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < grid.size(); i += n_workers) {
      try {
        dr.points[i] = run_point(ctx, sc, p, grid[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work, w);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return dr;
}

std::vector<double> log_grid(double a, double b, std::size_t n) {
  if (!(a > 0.0) || !(b > a) || n < 2) throw PreconditionError("log grid needs 0 < a < b and n >= 2");
  std::vector<double> g(n);
  const double la = std::log(a);
  const double lb = std::log(b);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = a;
  g.back() = b;
  return g;
}

std::pair<double, double> refine_threshold(const ScenarioContext& ctx, const Scenario& sc,
                                           ScanParameter p, double lo, double hi, double rel_tol,
                                           const RunOptions& options) {
  if (!(lo > 0.0) || !(hi > lo) || !(rel_tol > 0.0)) {
    throw PreconditionError("threshold refinement needs 0 < lo < hi and rel_tol > 0");
  }
  const auto lo_label = label_at(ctx, sc, p, lo, options);
  if (label_at(ctx, sc, p, hi, options) == lo_label) {
    throw PreconditionError("threshold bracket ends share a label");
  }
  while (hi / lo - 1.0 > rel_tol) {
    const double mid = std::sqrt(lo * hi);
    if (label_at(ctx, sc, p, mid, options) == lo_label) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

std::optional<double> minimal_healing_dose(const ScenarioContext& ctx, const Scenario& sc,
                                           ScanParameter antigen, double lo, double hi,
                                           double rel_tol, const RunOptions& options) {
  if (!(lo > 0.0) || !(hi > lo) || !(rel_tol > 0.0)) {
    throw PreconditionError("healing-dose search needs 0 < lo < hi and rel_tol > 0");
  }
  auto ok = [&](double d) { return heals(run_scenario(ctx, with_magnitude(sc, antigen, d), options)); };
  if (!ok(hi)) return std::nullopt;
  if (ok(lo)) return lo;
  while (hi / lo - 1.0 > rel_tol) {
    const double mid = std::sqrt(lo * hi);
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Redundancy

NetworkSpec split_mediator(const NetworkSpec& spec, Species role, std::size_t k) {
  if (!is_mediator(role)) throw PreconditionError("only mediators can be split");
  if (k < 1) throw PreconditionError("split count must be >= 1");
  const auto members = spec.all_of(role);
  if (members.size() != 1) throw PreconditionError("role must be carried by exactly one species");
  const std::size_t target = members.front();

  // map[new] = old index
  std::vector<std::size_t> map;
  NetworkSpec out;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (i != target) {
      map.push_back(i);
      out.species.push_back(spec.species[i]);
      continue;
    }
    for (std::size_t s = 1; s <= k; ++s) {
      map.push_back(i);
      auto info = spec.species[i];
      info.name += "_" + std::to_string(s);
      out.species.push_back(std::move(info));
    }
  }
  const auto n = static_cast<Eigen::Index>(map.size());
  const double share = 1.0 / static_cast<double>(k);
  out.w.resize(n, n);
  out.w1.resize(n, n);
  out.w2.resize(n, n);
  out.death.resize(n);
  out.source.resize(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto oa = static_cast<Eigen::Index>(map[static_cast<std::size_t>(a)]);
    const double scale = oa == static_cast<Eigen::Index>(target) ? share : 1.0;
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto ob = static_cast<Eigen::Index>(map[static_cast<std::size_t>(b)]);
      out.w(a, b) = scale * spec.w(oa, ob);
      out.w1(a, b) = scale * spec.w1(oa, ob);
      out.w2(a, b) = scale * spec.w2(oa, ob);
    }
    out.death[a] = spec.death[oa];
    out.source[a] = scale * spec.source[oa];
  }
  auto new_index = [&](std::size_t old) {
    return static_cast<std::size_t>(std::find(map.begin(), map.end(), old) - map.begin());
  };
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto& o = spec.origin[map[static_cast<std::size_t>(a)]];
    out.origin.push_back(o ? std::optional<std::size_t>(new_index(*o)) : std::nullopt);
    out.knocked_out.push_back(spec.knocked_out[map[static_cast<std::size_t>(a)]]);
  }
  out.clamp = spec.clamp;
  return out;
}

RedundancyReport redundancy_experiment(const ScenarioContext& ctx, std::size_t k, const RunOptions& options) {
  if (k < 2) throw PreconditionError("redundancy needs k >= 2");
  const auto split = split_mediator(ctx.spec, Species::CytA, k);
  const auto subs = split.all_of(Species::CytA);

  // Steady states carried over; the split share of CytA goes to each member.
  auto carry = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(split.size()));
    for (std::size_t i = 0; i < split.size(); ++i) {
      const bool sub = split.species[i].role == Species::CytA;
      const auto old = static_cast<Eigen::Index>(sub ? ctx.spec.at(Species::CytA) : remap_index(split, ctx.spec, i));
      y[static_cast<Eigen::Index>(i)] = sub ? x[old] / static_cast<double>(k) : x[old];
    }
    return y;
  };
  auto base = *find_builtin_scenario("active_immunization");
  for (auto& e : base.events) e.species = remap_index(ctx.spec, split, e.species);

  auto run = [&](const std::vector<std::size_t>& ko) {
    NetworkSpec s = split;
    for (auto i : ko) s = apply_knockout(std::move(s), i);
    ScenarioContext sub_ctx{std::move(s), ctx.steady};
    sub_ctx.steady.th1.state.x = carry(ctx.steady.th1.state.x);
    sub_ctx.steady.th2.state.x = carry(ctx.steady.th2.state.x);
    const auto r = run_scenario(sub_ctx, base, options);
    return KnockoutOutcome{ko, r.final_label, r.final_label_stable};
  };

  RedundancyReport rep;
  rep.k = k;
  for (auto i : subs) rep.single.push_back(run({i}));
  rep.whole_group = run(subs);
  return rep;
}

}  // namespace cytonet
