#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "cytonet/dynamics.hpp"
#include "cytonet/equilibria.hpp"
#include "cytonet/loops.hpp"
#include "cytonet/network_spec.hpp"
#include "cytonet/scenarios.hpp"

namespace cytonet {

// Network spec documents. See docs/formats.md for the grammar.

std::string write_spec(const NetworkSpec& spec);
/// `source` names the document in diagnostics.
NetworkSpec read_spec(std::string_view text, const std::string& source = "<spec>");
NetworkSpec load_spec(const std::filesystem::path& path);
void save_spec(const NetworkSpec& spec, const std::filesystem::path& path);

// Scenario documents.

std::string write_scenario(const NetworkSpec& spec, const Scenario& sc);
Scenario read_scenario(const NetworkSpec& spec, std::string_view text,
                       const std::string& source = "<scenario>");
Scenario load_scenario(const NetworkSpec& spec, const std::filesystem::path& path);

// Output tables.

/// Header `t,<species...>`, one row per recorded sample.
void write_trajectory_csv(std::ostream& os, const NetworkSpec& spec, const Trajectory& traj);
/// Header `time,kind,species,duration,magnitude`, one row per applied event.
void write_events_csv(std::ostream& os, const NetworkSpec& spec, const Trajectory& traj);
/// Four panels: T cells, cytokines, id/anti-id/antigen, id vs anti-id.
void write_trajectory_svg(std::ostream& os, const NetworkSpec& spec, const Trajectory& traj,
                          std::string_view title);

void write_steady_report(std::ostream& os, const NetworkSpec& spec, const SteadyStateReport& r);
void write_scenario_result(std::ostream& os, const ScenarioResult& r);
void write_dose_response_csv(std::ostream& os, const DoseResponse& dr);
void write_cycle_table(std::ostream& os, const SignedGraph& g, const std::vector<Cycle>& cycles);
void write_loop_checklist(std::ostream& os, const SignedGraph& g,
                          const std::vector<LoopCheck>& checks);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace cytonet
