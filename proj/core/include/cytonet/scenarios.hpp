#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cytonet/dynamics.hpp"
#include "cytonet/equilibria.hpp"
#include "cytonet/interventions.hpp"
#include "cytonet/network_spec.hpp"

namespace cytonet {

enum class ExpectedOutcome : std::uint8_t { EndsTH1, EndsTH2, Unconstrained };

std::string_view name(ExpectedOutcome e) noexcept;
std::optional<ExpectedOutcome> parse_expected_outcome(std::string_view text) noexcept;

enum class NamedState : std::uint8_t { TH1, TH2 };

using InitialCondition = std::variant<NamedState, Eigen::VectorXd>;

/// Time after the last event start that every scenario must simulate.
inline constexpr double kSettlingMargin = 200.0;

/// A protocol: start state, timed interventions, horizon and the outcome the
/// protocol is expected to produce.
struct Scenario {
  std::string name;
  InitialCondition init = NamedState::TH2;
  std::vector<Event> events;
  double horizon = kSettlingMargin;
  ExpectedOutcome expected = ExpectedOutcome::Unconstrained;

  /// Latest event start time (0 with no events).
  double last_event_time() const noexcept;
};

/// Throws ValidationError when the scenario breaks an invariant (horizon
/// margin, event validity against `spec`).
void validate_scenario(const NetworkSpec& spec, const Scenario& sc);

/// The spec plus its two certified steady states, shared by scenario runs.
struct ScenarioContext {
  NetworkSpec spec;
  BistabilityCertificate steady;

  static ScenarioContext prepare(NetworkSpec spec);
};

struct RunOptions {
  double dt = 1e-3;
  std::size_t record_every = 100;
  double dominance_ratio = kDefaultDominanceRatio;
  /// Fraction of the horizon over which the final label must not change.
  double stable_fraction = 0.1;
};

struct ScenarioResult {
  std::string name;
  Trajectory trajectory;
  std::vector<Phenotype> labels;
  Phenotype final_label = Phenotype::Other;
  /// Final label held over the last `stable_fraction` of the horizon.
  bool final_label_stable = false;
  ExpectedOutcome expected = ExpectedOutcome::Unconstrained;
  bool passed = false;
};

Eigen::VectorXd initial_state(const ScenarioContext& ctx, const InitialCondition& init);

/// Deterministic for fixed inputs. Knocked-out species start at zero.
ScenarioResult run_scenario(const ScenarioContext& ctx, const Scenario& sc,
                            const RunOptions& options = {});

/// True when the outcome label satisfies the expectation.
bool outcome_matches(ExpectedOutcome expected, Phenotype final_label, bool stable) noexcept;

// Default magnitudes of the builtin protocols.
namespace defaults {
inline constexpr double kEventTime = 20.0;
inline constexpr double kAdoptiveTransferDose = 0.22;
inline constexpr double kImmunizationAntigen = 2.7;
inline constexpr double kAdjuvantRate = 6.4;
inline constexpr double kAdjuvantDuration = 5.0;
inline constexpr double kHealingAntigen = 35.5;
inline constexpr double kIl4ModerateRate = 2.4;
inline constexpr double kIl4HighRate = 30.0;
inline constexpr double kIl4Duration = 62.5;
inline constexpr double kAntiIl4Rate = 10.0;
inline constexpr double kAntiIl4Duration = 220.0;
inline constexpr double kTh1PulseRate = 200.0;
inline constexpr double kTh1PulseDuration = 5.4;
inline constexpr double kTh1ContinuousRate = 200.0;
inline constexpr double kSubthresholdFraction = 0.1;
}  // namespace defaults

/// The ten canonical protocols, in a fixed order:
/// baseline, adoptive_transfer, active_immunization, free_antigen_heal,
/// antigen_plus_il4, il4_high_dose, antigen_plus_anti_il4, th1_pulse_heal,
/// th1_continuous, subthreshold_transfer.
std::vector<Scenario> builtin_scenarios();

std::optional<Scenario> find_builtin_scenario(std::string_view name);

// ---------------------------------------------------------------------------
// Dose-response

/// Which event magnitude a scan varies.
struct ScanParameter {
  std::size_t event_index = 0;
};

/// Resolves "<index>" or "<kind>:<species>" (first matching event) against a
/// scenario. Returns nullopt when nothing matches.
std::optional<ScanParameter> parse_scan_parameter(const NetworkSpec& spec, const Scenario& sc,
                                                  std::string_view text);

struct DosePoint {
  double dose = 0.0;
  Phenotype final_label = Phenotype::Other;
  /// Final total CytA minus total CytB.
  double response = 0.0;
};

struct DoseResponse {
  ScanParameter parameter;
  std::vector<DosePoint> points;

  /// Number of label changes along the grid.
  std::size_t boundary_count() const noexcept;
  /// When exactly one label change exists: the bracketing grid doses.
  std::optional<std::pair<double, double>> threshold_bracket() const noexcept;
  /// Largest relative spread of `response` over doses in [top / 10, top].
  double top_decade_variation() const;
};

Scenario with_magnitude(Scenario sc, ScanParameter p, double magnitude);

/// Runs the scenario once per grid magnitude. The grid must be strictly
/// increasing with at least three points. Points are evaluated by up to
/// `workers` threads; the result is in grid order regardless.
DoseResponse dose_scan(const ScenarioContext& ctx, const Scenario& sc, ScanParameter p,
                       const std::vector<double>& grid, const RunOptions& options = {},
                       std::size_t workers = 1);

/// `n` log-spaced points from a to b inclusive.
std::vector<double> log_grid(double a, double b, std::size_t n);

/// Geometric bisection of the label boundary between lo and hi until
/// hi / lo - 1 <= rel_tol. `lo` and `hi` must end with different labels.
/// Returns the final bracket.
std::pair<double, double> refine_threshold(const ScenarioContext& ctx, const Scenario& sc,
                                           ScanParameter p, double lo, double hi, double rel_tol,
                                           const RunOptions& options = {});

/// Smallest antigen dose that heals `sc` (ending TH2), searched over
/// [lo, hi] by bisection to `rel_tol`. Nullopt when `hi` does not heal.
std::optional<double> minimal_healing_dose(const ScenarioContext& ctx, const Scenario& sc,
                                           ScanParameter antigen, double lo, double hi,
                                           double rel_tol, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Redundancy

/// Splits CytA into k sub-species. Each receives 1/k of every CytA
/// production weight and a full copy of every CytA outgoing weight.
NetworkSpec split_mediator(const NetworkSpec& spec, Species role, std::size_t k);

struct KnockoutOutcome {
  /// Indices (in the split spec) of the knocked-out sub-species.
  std::vector<std::size_t> knocked_out;
  Phenotype final_label = Phenotype::Other;
  bool final_label_stable = false;
};

struct RedundancyReport {
  std::size_t k = 0;
  /// One entry per single-sub-species knockout.
  std::vector<KnockoutOutcome> single;
  /// All k sub-species knocked out.
  KnockoutOutcome whole_group;
};

/// Runs active_immunization on the k-way split of CytA with each single
/// sub-species knocked out, then with the whole group knocked out.
RedundancyReport redundancy_experiment(const ScenarioContext& ctx, std::size_t k,
                                       const RunOptions& options = {});

}  // namespace cytonet
