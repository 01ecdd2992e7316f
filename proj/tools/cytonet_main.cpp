// cytonet command-line driver.
//
//   cytonet run adoptive_transfer --out results --plots
//   cytonet scan adoptive_transfer --param bolus:TH1id --grid 0.01:10:25
//   cytonet steady --spec my.cnet
//
// Exit codes: 0 success, 1 expected outcome not met, 2 bad input.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cytonet/calibrate.hpp"
#include "cytonet/error.hpp"
#include "cytonet/io.hpp"
#include "cytonet/loops.hpp"
#include "cytonet/scenarios.hpp"

namespace fs = std::filesystem;
using namespace cytonet;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kBadInput = 2;

struct Common {
  std::string spec_path;
  double dt = 1e-3;
  std::string out_dir = ".";
  bool plots = false;
  std::size_t workers = 1;
};

struct Grid {
  double a = 0.0;
  double b = 0.0;
  std::size_t n = 0;
};

Grid parse_grid(const std::string& text) {
  Grid g;
  std::istringstream in(text);
  std::string a, b, n;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, n) || in.rdbuf()->in_avail() != 0) {
    throw ValidationError("--grid expects a:b:n");
  }
  try {
    std::size_t used = 0;
    g.a = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    g.b = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    const long long count = std::stoll(n, &used);
    if (used != n.size() || count < 0) throw std::invalid_argument(n);
    g.n = static_cast<std::size_t>(count);
  } catch (const std::logic_error&) {
    throw ValidationError("--grid expects numbers a:b:n, got '" + text + "'");
  }
  if (!(g.a > 0.0) || !(g.b > g.a) || g.n < 3) throw ValidationError("--grid needs 0 < a < b and n >= 3");
  return g;
}

NetworkSpec load_network(const Common& c) {
  return c.spec_path.empty() ? reference_spec() : load_spec(c.spec_path);
}

// A builtin name, or a path to a scenario file.
Scenario resolve_scenario(const NetworkSpec& spec, const std::string& which) {
  if (auto sc = find_builtin_scenario(which)) {
    // Builtin protocols use canonical indices.
    if (!spec.is_canonical()) throw ValidationError("builtin scenarios need the canonical nine-species roster");
    return *sc;
  }
  if (fs::exists(which)) return load_scenario(spec, which);
  throw ValidationError("'" + which + "' is neither a builtin scenario nor a readable file");
}

std::ofstream open_out(const Common& c, const std::string& file) {
  fs::create_directories(c.out_dir);
  const auto path = fs::path(c.out_dir) / file;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

ScenarioContext prepare(const NetworkSpec& spec) {
  try {
    return ScenarioContext::prepare(spec);
  } catch (const CertificateError& e) {
    throw ValidationError(std::string("spec is not bistable: ") + e.what());
  }
}

RunOptions run_options(const Common& c) {
  RunOptions o;
  o.dt = c.dt;
  return o;
}

void write_run_outputs(const Common& c, const NetworkSpec& spec, const ScenarioResult& r) {
  {
    auto out = open_out(c, r.name + ".csv");
    write_trajectory_csv(out, spec, r.trajectory);
  }
  {
    auto out = open_out(c, r.name + ".events.csv");
    write_events_csv(out, spec, r.trajectory);
  }
  if (c.plots) {
    auto out = open_out(c, r.name + ".svg");
    write_trajectory_svg(out, spec, r.trajectory, r.name);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for the id/anti-id TH1-TH2 cytokine network"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cytonet 0.1.0");

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", common.spec_path, "Network spec file (default: built-in reference)")
        ->check(CLI::ExistingFile);
    sub->add_option("--dt", common.dt, "Integration step")->check(CLI::PositiveNumber);
    sub->add_option("--out", common.out_dir, "Output directory");
    sub->add_flag("--plots", common.plots, "Also write SVG plots");
  };

  std::string scenario_name;
  std::optional<double> horizon;
  std::optional<double> dose;
  std::string param;
  std::string grid_text;
  std::size_t k = 2;
  std::uint64_t seed = kReferenceSeed;
  std::size_t budget = 64;
  std::size_t max_len = kDefaultMaxCycleLength;

  auto* run = app.add_subcommand("run", "Run a scenario and write its trajectory");
  add_common(run);
  run->add_option("scenario,--scenario", scenario_name, "Builtin name or scenario file")->required();
  run->add_option("--horizon", horizon, "Override the horizon");
  run->add_option("--dose", dose, "Override the magnitude of the scanned event (see --param)");
  run->add_option("--param", param, "Event selected by --dose: index or kind:species (default 0)");

  auto* steady = app.add_subcommand("steady", "Certify and print the TH2 and TH1 steady states");
  add_common(steady);

  auto* scan = app.add_subcommand("scan", "Dose-response scan of one event magnitude");
  add_common(scan);
  scan->add_option("scenario,--scenario", scenario_name, "Builtin name or scenario file")->required();
  scan->add_option("--param", param, "Event to scan: index or kind:species")->required();
  scan->add_option("--grid", grid_text, "Log-spaced grid a:b:n")->required();
  scan->add_option("--workers", common.workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* loops = app.add_subcommand("loops", "List signed feedback cycles and the loop checklist");
  add_common(loops);
  loops->add_option("--max-len", max_len, "Longest cycle to enumerate")->check(CLI::PositiveNumber);

  auto* redundancy = app.add_subcommand("redundancy", "Knockout experiment on a k-way split of CytA");
  add_common(redundancy);
  redundancy->add_option("--k", k, "Number of CytA sub-species")->check(CLI::Range(2, 16));

  auto* calib = app.add_subcommand("calibrate", "Seeded search for a network passing every protocol");
  add_common(calib);
  calib->add_option("--seed", seed, "Search seed");
  calib->add_option("--budget", budget, "Candidates to try");
  calib->add_option("--workers", common.workers, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    const auto spec = load_network(common);

    if (*run) {
      auto sc = resolve_scenario(spec, scenario_name);
      if (horizon) sc.horizon = *horizon;
      if (dose) {
        const auto p = parse_scan_parameter(spec, sc, param.empty() ? "0" : param);
        if (!p) throw ValidationError("--param does not name an event of " + sc.name);
        sc = with_magnitude(sc, *p, *dose);
      }
      validate_scenario(spec, sc);
      const auto ctx = prepare(spec);
      const auto r = run_scenario(ctx, sc, run_options(common));
      write_run_outputs(common, spec, r);
      write_scenario_result(std::cout, r);
      return r.passed ? kOk : kMismatch;
    }

    if (*steady) {
      const auto ctx = prepare(spec);
      std::cout << "[th2]\n";
      write_steady_report(std::cout, spec, ctx.steady.th2);
      std::cout << "\n[th1]\n";
      write_steady_report(std::cout, spec, ctx.steady.th1);
      const bool ordered = th2_state_is_lower(spec, ctx.steady);
      std::cout << "\nordering = " << (ordered ? "th2_lower" : "violated") << '\n';
      return ordered ? kOk : kMismatch;
    }

    if (*scan) {
      const auto sc = resolve_scenario(spec, scenario_name);
      const auto p = parse_scan_parameter(spec, sc, param);
      if (!p) throw ValidationError("--param does not name an event of " + sc.name);
      const auto g = parse_grid(grid_text);
      const auto ctx = prepare(spec);
      const auto dr = dose_scan(ctx, sc, *p, log_grid(g.a, g.b, g.n), run_options(common), common.workers);
      {
        auto out = open_out(common, sc.name + ".scan.csv");
        write_dose_response_csv(out, dr);
      }
      write_dose_response_csv(std::cout, dr);
      std::cout << "boundaries = " << dr.boundary_count() << '\n';
      if (const auto b = dr.threshold_bracket()) {
        std::cout << "threshold_bracket = " << format_double(b->first) << ' ' << format_double(b->second) << '\n';
      }
      std::cout << "top_decade_variation = " << format_double(dr.top_decade_variation()) << '\n';
      return kOk;
    }

    if (*loops) {
      const auto g = signed_adjacency(spec);
      const auto cycles = enumerate_cycles(g, max_len);
      write_cycle_table(std::cout, g, cycles);
      std::cout << '\n';
      const auto checks = verify_feedback_loops(g, max_len);
      write_loop_checklist(std::cout, g, checks);
      const bool all = std::all_of(checks.begin(), checks.end(), [](const LoopCheck& c) { return c.found; });
      return all ? kOk : kMismatch;
    }

    if (*redundancy) {
      const auto ctx = prepare(spec);
      const auto rep = redundancy_experiment(ctx, k, run_options(common));
      const auto split = split_mediator(spec, Species::CytA, k);
      bool ok = true;
      std::cout << "knocked_out,final_label,stable\n";
      auto row = [&](const KnockoutOutcome& o, Phenotype want) {
        std::string names;
        for (auto i : o.knocked_out) names += (names.empty() ? "" : " ") + split.species[i].name;
        std::cout << names << ',' << name(o.final_label) << ',' << (o.final_label_stable ? "true" : "false") << '\n';
        ok = ok && o.final_label == want && o.final_label_stable;
      };
      for (const auto& o : rep.single) row(o, Phenotype::TH1);
      row(rep.whole_group, Phenotype::TH2);
      return ok ? kOk : kMismatch;
    }

    if (*calib) {
      CalibrationOptions opt;
      opt.seed = seed;
      opt.budget = budget;
      opt.run = run_options(common);
      opt.workers = common.workers;
      try {
        const auto r = calibrate(reference_constraints(), opt);
        {
          auto out = open_out(common, "calibrated_spec.cnet");
          out << write_spec(r.spec);
        }
        std::cout << "seed = " << r.seed << "\ncandidate = " << r.candidate << "\nscore = " << r.scorecard.passed()
                  << '/' << r.scorecard.total() << '\n';
        return kOk;
      } catch (const CalibrationError& e) {
        std::cerr << "cytonet: " << e.what() << '\n';
        for (const auto& [n, passed] : e.best().scenarios) std::cerr << "  " << n << ": " << (passed ? "pass" : "fail") << '\n';
        return kMismatch;
      }
    }
  } catch (const ParseError& e) {
    std::cerr << e.what() << '\n';
    return kBadInput;
  } catch (const Error& e) {
    std::cerr << "cytonet: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "cytonet: " << e.what() << '\n';
    return kBadInput;
  }
  return kOk;
}
