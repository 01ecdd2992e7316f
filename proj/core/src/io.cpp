#include "cytonet/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "cytonet/error.hpp"

namespace cytonet {

namespace {

// ---------------------------------------------------------------------------
// Tokenising

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const auto b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

// Non-empty lines with comments removed.
std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    auto line = text.substr(pos, end - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) out.push_back({number, line});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quote_name(std::string_view s) { return "'" + std::string(s) + "'"; }

// ---------------------------------------------------------------------------
// Spec documents

enum class Section { None, Species, W, W1, W2, Death, Source, Origin, Knockout, Options };

std::optional<Section> parse_section(std::string_view name) {
  static const std::array<std::pair<std::string_view, Section>, 9> table = {{
      {"species", Section::Species},
      {"weights.w", Section::W},
      {"weights.w1", Section::W1},
      {"weights.w2", Section::W2},
      {"death", Section::Death},
      {"source", Section::Source},
      {"origin", Section::Origin},
      {"knockout", Section::Knockout},
      {"options", Section::Options},
  }};
  for (const auto& [n, s] : table) {
    if (n == name) return s;
  }
  return std::nullopt;
}

std::string_view clamp_name(ClampMode m) {
  return m == ClampMode::TotalProliferation ? "total" : "differentiation-only";
}

// Where each entry of a spec document came from, for diagnostics.
struct SpecLines {
  std::size_t species = 0;
  std::map<std::tuple<Channel, std::size_t, std::size_t>, std::size_t> weights;
  std::map<std::size_t, std::size_t> death;
  std::map<std::size_t, std::size_t> source;
  std::map<std::size_t, std::size_t> origin;

  std::size_t locate(const Violation& v) const {
    auto lookup = [](const auto& m, std::size_t i) -> std::size_t {
      const auto it = m.find(i);
      return it == m.end() ? 0 : it->second;
    };
    if (v.channel && v.indices.size() >= 2) {
      const auto it = weights.find({*v.channel, v.indices[0], v.indices[1]});
      return it == weights.end() ? 0 : it->second;
    }
    if (v.indices.empty()) return species;
    switch (v.kind) {
      case ViolationKind::NonPositiveDeath:
      case ViolationKind::LifespanOrdering:
        return lookup(death, v.indices[0]);
      case ViolationKind::NegativeSource:
        return lookup(source, v.indices[0]);
      case ViolationKind::Origin:
        return lookup(origin, v.indices[0]);
      default:
        return species;
    }
  }
};

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf.data(), ptr);
}

std::string write_spec(const NetworkSpec& spec) {
  std::ostringstream os;
  os << "# cytonet network spec\n\n[species]\n";
  for (const auto& s : spec.species) {
    os << s.name << ' ' << name(s.kind);
    if (parse_species(s.name) != s.role) os << ' ' << name(s.role);
    os << '\n';
  }
  const auto n = static_cast<Eigen::Index>(spec.size());
  for (auto c : {Channel::Interaction, Channel::Differentiation, Channel::Secretion}) {
    os << "\n[weights." << name(c) << "]\n";
    const auto& m = spec.matrix(c);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (m(i, j) == 0.0) continue;
        os << spec.species[static_cast<std::size_t>(i)].name << ' '
           << spec.species[static_cast<std::size_t>(j)].name << ' ' << format_double(m(i, j)) << '\n';
      }
    }
  }
  os << "\n[death]\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    os << spec.species[static_cast<std::size_t>(i)].name << ' ' << format_double(spec.death[i]) << '\n';
  }
  os << "\n[source]\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    if (spec.source[i] == 0.0) continue;
    os << spec.species[static_cast<std::size_t>(i)].name << ' ' << format_double(spec.source[i]) << '\n';
  }
  os << "\n[origin]\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (spec.origin[i]) os << spec.species[i].name << ' ' << spec.species[*spec.origin[i]].name << '\n';
  }
  if (std::any_of(spec.knocked_out.begin(), spec.knocked_out.end(), [](bool b) { return b; })) {
    os << "\n[knockout]\n";
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (spec.knocked_out[i]) os << spec.species[i].name << '\n';
    }
  }
  os << "\n[options]\nclamp " << clamp_name(spec.clamp) << '\n';
  return os.str();
}

NetworkSpec read_spec(std::string_view text, const std::string& source) {
  NetworkSpec spec;
  SpecLines lines;
  Section section = Section::None;
  bool species_closed = false;
  std::vector<bool> death_seen;

  auto fail = [&](std::size_t line, const std::string& msg) -> void { throw ParseError(source, line, msg); };
  auto species_index = [&](const Line& l, std::string_view n) {
    const auto i = spec.find(n);
    if (!i) fail(l.number, "unknown species " + quote_name(n));
    return *i;
  };
  auto expect_tokens = [&](const Line& l, const std::vector<std::string_view>& tok, std::size_t want,
                           const char* shape) {
    if (tok.size() != want) fail(l.number, std::string("expected '") + shape + "'");
  };
  auto number = [&](const Line& l, std::string_view s) {
    const auto v = parse_double(s);
    if (!v) fail(l.number, "not a number: " + quote_name(s));
    return *v;
  };
  auto close_species = [&](const Line& l) {
    if (species_closed) return;
    if (spec.species.empty()) fail(l.number, "the [species] section must come first and list at least one species");
    const auto n = static_cast<Eigen::Index>(spec.size());
    spec.w = Eigen::MatrixXd::Zero(n, n);
    spec.w1 = Eigen::MatrixXd::Zero(n, n);
    spec.w2 = Eigen::MatrixXd::Zero(n, n);
    spec.death = Eigen::VectorXd::Zero(n);
    spec.source = Eigen::VectorXd::Zero(n);
    spec.origin.assign(spec.size(), std::nullopt);
    spec.knocked_out.assign(spec.size(), false);
    death_seen.assign(spec.size(), false);
    species_closed = true;
  };

  std::vector<Section> seen_sections;
  for (const auto& l : content_lines(text)) {
    if (l.text.front() == '[') {
      if (l.text.back() != ']') fail(l.number, "unterminated section header");
      const auto sname = trim(l.text.substr(1, l.text.size() - 2));
      const auto s = parse_section(sname);
      if (!s) fail(l.number, "unknown section " + quote_name(sname));
      if (std::find(seen_sections.begin(), seen_sections.end(), *s) != seen_sections.end()) {
        fail(l.number, "duplicate section " + quote_name(sname));
      }
      seen_sections.push_back(*s);
      if (*s == Section::Species) {
        if (species_closed) fail(l.number, "the [species] section must come first");
        lines.species = l.number;
      } else {
        close_species(l);
      }
      section = *s;
      continue;
    }
    const auto tok = split_ws(l.text);
    switch (section) {
      case Section::None:
        fail(l.number, "entry outside of any section");
        break;
      case Section::Species: {
        if (tok.size() < 2 || tok.size() > 3) fail(l.number, "expected '<name> <kind> [<role>]'");
        if (spec.find(tok[0])) fail(l.number, "duplicate species " + quote_name(tok[0]));
        const auto kind = parse_species_kind(tok[1]);
        if (!kind) fail(l.number, "unknown species kind " + quote_name(tok[1]) + " (cell, mediator, decaying)");
        const auto role = parse_species(tok.size() == 3 ? tok[2] : tok[0]);
        if (!role) fail(l.number, "cannot infer the role of " + quote_name(tok[0]) + "; add a role column");
        spec.species.push_back({std::string(tok[0]), *role, *kind});
        break;
      }
      case Section::W:
      case Section::W1:
      case Section::W2: {
        expect_tokens(l, tok, 3, "<target> <source> <value>");
        const auto c = section == Section::W ? Channel::Interaction
                       : section == Section::W1 ? Channel::Differentiation
                                                : Channel::Secretion;
        const auto i = species_index(l, tok[0]);
        const auto j = species_index(l, tok[1]);
        const auto key = std::tuple{c, i, j};
        if (lines.weights.count(key) != 0) {
          fail(l.number, "duplicate weight (first set on line " + std::to_string(lines.weights[key]) + ")");
        }
        lines.weights[key] = l.number;
        spec.matrix(c)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = number(l, tok[2]);
        break;
      }
      case Section::Death:
      case Section::Source: {
        expect_tokens(l, tok, 2, "<species> <value>");
        const auto i = species_index(l, tok[0]);
        auto& where = section == Section::Death ? lines.death : lines.source;
        if (where.count(i) != 0) fail(l.number, "duplicate entry for " + quote_name(tok[0]));
        where[i] = l.number;
        (section == Section::Death ? spec.death : spec.source)[static_cast<Eigen::Index>(i)] = number(l, tok[1]);
        if (section == Section::Death) death_seen[i] = true;
        break;
      }
      case Section::Origin: {
        expect_tokens(l, tok, 2, "<species> <origin species>");
        const auto i = species_index(l, tok[0]);
        if (lines.origin.count(i) != 0) fail(l.number, "duplicate origin for " + quote_name(tok[0]));
        lines.origin[i] = l.number;
        spec.origin[i] = species_index(l, tok[1]);
        break;
      }
      case Section::Knockout: {
        expect_tokens(l, tok, 1, "<species>");
        const auto i = species_index(l, tok[0]);
        if (!is_mediator(spec.species[i].role)) fail(l.number, "only mediators can be knocked out");
        spec.knocked_out[i] = true;
        break;
      }
      case Section::Options: {
        expect_tokens(l, tok, 2, "<option> <value>");
        if (tok[0] != "clamp") fail(l.number, "unknown option " + quote_name(tok[0]));
        if (tok[1] == clamp_name(ClampMode::TotalProliferation)) {
          spec.clamp = ClampMode::TotalProliferation;
        } else if (tok[1] == clamp_name(ClampMode::DifferentiationOnly)) {
          spec.clamp = ClampMode::DifferentiationOnly;
        } else {
          fail(l.number, "unknown clamp mode " + quote_name(tok[1]) + " (total, differentiation-only)");
        }
        break;
      }
    }
  }
  if (!species_closed) {
    if (spec.species.empty()) fail(0, "missing [species] section");
    close_species(Line{lines.species, {}});
  }
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (!death_seen[i]) fail(0, "no death rate for species " + quote_name(spec.species[i].name));
  }

  const auto report = validate_spec(spec);
  if (!report.ok()) {
    std::string msg = "invalid network spec";
    std::size_t first = 0;
    for (const auto& v : report.violations) {
      const auto at = lines.locate(v);
      if (first == 0) first = at;
      msg += "\n  " + source + (at > 0 ? ":" + std::to_string(at) : std::string{}) + ": " +
             std::string(name(v.kind)) + ": " + v.message;
    }
    throw ParseError(source, first, msg);
  }
  return spec;
}

NetworkSpec load_spec(const std::filesystem::path& path) { return read_spec(slurp(path), path.string()); }

void save_spec(const NetworkSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << write_spec(spec);
}

// ---------------------------------------------------------------------------
// Scenario documents

std::string write_scenario(const NetworkSpec& spec, const Scenario& sc) {
  std::ostringstream os;
  os << "name = " << sc.name << '\n';
  if (const auto* named = std::get_if<NamedState>(&sc.init)) {
    os << "init = " << (*named == NamedState::TH1 ? "th1" : "th2") << '\n';
  } else {
    const auto& v = std::get<Eigen::VectorXd>(sc.init);
    os << "init =";
    for (Eigen::Index i = 0; i < v.size(); ++i) os << ' ' << format_double(v[i]);
    os << '\n';
  }
  os << "horizon = " << format_double(sc.horizon) << '\n';
  os << "expected = " << name(sc.expected) << '\n';
  for (const auto& e : sc.events) {
    if (e.species >= spec.size()) throw PreconditionError("event targets an unknown species");
    os << "event = " << name(e.kind) << ' ' << spec.species[e.species].name << ' ' << format_double(e.time)
       << ' ' << format_double(e.duration) << ' ' << format_double(e.magnitude) << '\n';
  }
  return os.str();
}

Scenario read_scenario(const NetworkSpec& spec, std::string_view text, const std::string& source) {
  Scenario sc;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::vector<std::size_t> event_lines;
  auto fail = [&](std::size_t line, const std::string& msg) -> void { throw ParseError(source, line, msg); };

  for (const auto& l : content_lines(text)) {
    const auto eq = l.text.find('=');
    if (eq == std::string_view::npos) fail(l.number, "expected '<key> = <value>'");
    const auto key = trim(l.text.substr(0, eq));
    const auto value = trim(l.text.substr(eq + 1));
    if (value.empty()) fail(l.number, "empty value for " + quote_name(key));
    if (key != "event") {
      if (auto it = seen.find(key); it != seen.end()) {
        fail(l.number, "duplicate key " + quote_name(key) + " (first on line " + std::to_string(it->second) + ")");
      }
      seen.emplace(std::string(key), l.number);
    }
    if (key == "name") {
      if (split_ws(value).size() != 1) fail(l.number, "scenario names cannot contain spaces");
      sc.name = std::string(value);
    } else if (key == "init") {
      if (value == "th1") {
        sc.init = NamedState::TH1;
      } else if (value == "th2") {
        sc.init = NamedState::TH2;
      } else {
        const auto tok = split_ws(value);
        if (tok.size() != spec.size()) {
          fail(l.number, "init must be th1, th2 or " + std::to_string(spec.size()) + " numbers");
        }
        Eigen::VectorXd v(static_cast<Eigen::Index>(tok.size()));
        for (std::size_t i = 0; i < tok.size(); ++i) {
          const auto d = parse_double(tok[i]);
          if (!d) fail(l.number, "not a number: " + quote_name(tok[i]));
          if (!(*d >= 0.0) || !std::isfinite(*d)) fail(l.number, "initial concentrations must be finite and >= 0");
          v[static_cast<Eigen::Index>(i)] = *d;
        }
        sc.init = v;
      }
    } else if (key == "horizon") {
      const auto d = parse_double(value);
      if (!d) fail(l.number, "not a number: " + quote_name(value));
      sc.horizon = *d;
    } else if (key == "expected") {
      const auto e = parse_expected_outcome(value);
      if (!e) fail(l.number, "expected must be ends_th1, ends_th2 or unconstrained");
      sc.expected = *e;
    } else if (key == "event") {
      const auto tok = split_ws(value);
      if (tok.size() != 5) fail(l.number, "expected 'event = <kind> <species> <time> <duration> <magnitude>'");
      const auto kind = parse_event_kind(tok[0]);
      if (!kind) fail(l.number, "unknown event kind " + quote_name(tok[0]) + " (bolus, infusion, blockade, knockout)");
      const auto sp = spec.find(tok[1]);
      if (!sp) fail(l.number, "unknown species " + quote_name(tok[1]));
      Event e{*kind, *sp, 0.0, 0.0, 0.0};
      for (std::size_t k = 2; k < 5; ++k) {
        const auto d = parse_double(tok[k]);
        if (!d) fail(l.number, "not a number: " + quote_name(tok[k]));
        (k == 2 ? e.time : k == 3 ? e.duration : e.magnitude) = *d;
      }
      try {
        validate_event(spec, e);
      } catch (const ValidationError& err) {
        fail(l.number, err.what());
      }
      sc.events.push_back(e);
      event_lines.push_back(l.number);
    } else {
      fail(l.number, "unknown key " + quote_name(key));
    }
  }
  for (const char* required : {"name", "init", "horizon", "expected"}) {
    if (seen.find(std::string_view(required)) == seen.end()) {
      fail(0, std::string("missing key '") + required + "'");
    }
  }
  for (std::size_t i = 1; i < sc.events.size(); ++i) {
    if (sc.events[i].time < sc.events[i - 1].time) fail(event_lines[i], "events must be listed in time order");
  }
  try {
    validate_scenario(spec, sc);
  } catch (const ValidationError& err) {
    fail(seen.at("horizon"), err.what());
  }
  return sc;
}

Scenario load_scenario(const NetworkSpec& spec, const std::filesystem::path& path) {
  return read_scenario(spec, slurp(path), path.string());
}

// ---------------------------------------------------------------------------
// Tables

void write_trajectory_csv(std::ostream& os, const NetworkSpec& spec, const Trajectory& traj) {
  os << 't';
  for (const auto& s : spec.species) os << ',' << s.name;
  os << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << format_double(traj.times[k]);
    for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) os << ',' << format_double(traj.states[k][i]);
    os << '\n';
  }
}

void write_events_csv(std::ostream& os, const NetworkSpec& spec, const Trajectory& traj) {
  os << "time,kind,species,duration,magnitude\n";
  for (const auto& m : traj.events) {
    os << format_double(m.event.time) << ',' << name(m.event.kind) << ',' << spec.species[m.event.species].name
       << ',' << format_double(m.event.duration) << ',' << format_double(m.event.magnitude) << '\n';
  }
}

void write_steady_report(std::ostream& os, const NetworkSpec& spec, const SteadyStateReport& r) {
  os << "label = " << name(r.label) << '\n';
  os << "residual = " << format_double(r.residual) << '\n';
  os << "converged = " << (r.converged ? "true" : "false") << '\n';
  os << "stability = " << name(r.stability.verdict) << '\n';
  os << "leading_eigen_real = " << format_double(r.stability.leading_eigen_real) << '\n';
  os << "nonsmooth = " << (r.stability.nonsmooth ? "true" : "false") << '\n';
  os << "method = " << (r.method == SolveMethod::Newton ? "newton" : "integration") << '\n';
  os << "iterations = " << r.iterations << '\n';
  auto eig = r.stability.eigenvalues;
  std::vector<std::complex<double>> sorted(eig.data(), eig.data() + eig.size());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  os << "eigenvalues =";
  for (const auto& z : sorted) {
    os << ' ' << format_double(z.real());
    if (z.imag() != 0.0) os << (z.imag() > 0 ? "+" : "") << format_double(z.imag()) << 'i';
  }
  os << '\n';
  for (std::size_t i = 0; i < spec.size(); ++i) {
    os << "state." << spec.species[i].name << " = " << format_double(r.state.x[static_cast<Eigen::Index>(i)]) << '\n';
  }
}

void write_scenario_result(std::ostream& os, const ScenarioResult& r) {
  os << "scenario = " << r.name << '\n';
  os << "expected = " << name(r.expected) << '\n';
  os << "final_label = " << name(r.final_label) << '\n';
  os << "final_label_stable = " << (r.final_label_stable ? "true" : "false") << '\n';
  os << "result = " << (r.passed ? "pass" : "fail") << '\n';
}

void write_dose_response_csv(std::ostream& os, const DoseResponse& dr) {
  os << "dose,final_label,response\n";
  for (const auto& p : dr.points) {
    os << format_double(p.dose) << ',' << name(p.final_label) << ',' << format_double(p.response) << '\n';
  }
}

void write_cycle_table(std::ostream& os, const SignedGraph& g, const std::vector<Cycle>& cycles) {
  os << "length,sign,nodes\n";
  for (const auto& c : cycles) {
    os << c.length() << ',' << (c.sign > 0 ? '+' : '-') << ',';
    for (std::size_t k = 0; k < c.nodes.size(); ++k) os << (k ? " " : "") << g.nodes[c.nodes[k]];
    os << '\n';
  }
}

void write_loop_checklist(std::ostream& os, const SignedGraph& g, const std::vector<LoopCheck>& checks) {
  for (std::size_t k = 0; k < checks.size(); ++k) {
    const auto& c = checks[k];
    os << (c.found ? "[PASS] " : "[FAIL] ") << k + 1 << ". " << c.name << " ("
       << (c.expected_sign > 0 ? '+' : '-') << "): ";
    if (c.found) {
      os << format_cycle(g, c.witness);
    } else {
      os << "no cycle found";
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Plot

namespace {

struct Series {
  std::string label;
  std::vector<double> y;
};

constexpr std::array<const char*, 6> kColours = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt_axis(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

void panel(std::ostream& os, double x0, double y0, double w, double h, const std::string& title,
           const std::vector<double>& xs, const std::vector<Series>& series, const std::vector<double>& marks,
           bool phase) {
  double xmin = xs.empty() ? 0.0 : *std::min_element(xs.begin(), xs.end());
  double xmax = xs.empty() ? 1.0 : *std::max_element(xs.begin(), xs.end());
  double ymin = 0.0;
  double ymax = 0.0;
  for (const auto& s : series) {
    for (double v : s.y) ymax = std::max(ymax, v);
  }
  if (phase) xmin = 0.0;
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double pad_l = 50, pad_r = 10, pad_t = 24, pad_b = 28;
  const double pw = w - pad_l - pad_r;
  const double ph = h - pad_t - pad_b;
  auto px = [&](double v) { return x0 + pad_l + (v - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) { return y0 + pad_t + ph - (v - ymin) / (ymax - ymin) * ph; };

  os << "<text x=\"" << x0 + pad_l << "\" y=\"" << y0 + 16 << "\" font-size=\"13\">" << title << "</text>\n";
  os << "<rect x=\"" << x0 + pad_l << "\" y=\"" << y0 + pad_t << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<text x=\"" << x0 + 4 << "\" y=\"" << y0 + pad_t + 10 << "\" font-size=\"10\">" << fmt_axis(ymax) << "</text>\n";
  os << "<text x=\"" << x0 + 4 << "\" y=\"" << y0 + pad_t + ph << "\" font-size=\"10\">" << fmt_axis(ymin) << "</text>\n";
  os << "<text x=\"" << x0 + pad_l << "\" y=\"" << y0 + h - 8 << "\" font-size=\"10\">" << fmt_axis(xmin) << "</text>\n";
  os << "<text x=\"" << x0 + pad_l + pw - 30 << "\" y=\"" << y0 + h - 8 << "\" font-size=\"10\">" << fmt_axis(xmax)
     << "</text>\n";
  for (double m : marks) {
    os << "<line x1=\"" << px(m) << "\" y1=\"" << y0 + pad_t << "\" x2=\"" << px(m) << "\" y2=\"" << y0 + pad_t + ph
       << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto* colour = kColours[k % kColours.size()];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < xs.size() && i < series[k].y.size(); ++i) {
      os << px(xs[i]) << ',' << py(series[k].y[i]) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << x0 + pad_l + pw - 110 << "\" y=\"" << y0 + pad_t + 14 + 13 * static_cast<double>(k)
       << "\" font-size=\"11\" fill=\"" << colour << "\">" << series[k].label << "</text>\n";
  }
}

}  // namespace

void write_trajectory_svg(std::ostream& os, const NetworkSpec& spec, const Trajectory& traj,
                          std::string_view title) {
  auto totals = [&](Species role) {
    std::vector<double> y;
    y.reserve(traj.size());
    for (const auto& x : traj.states) y.push_back(role_total(spec, x, role));
    return y;
  };
  std::vector<double> id;
  for (const auto& x : traj.states) id.push_back(id_aggregate(spec, x));
  std::vector<double> marks;
  for (const auto& m : traj.events) marks.push_back(m.event.time);

  const double w = 520, h = 300;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * w << "\" height=\"" << 2 * h + 30
     << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"10\" y=\"20\" font-size=\"15\">" << title << "</text>\n";
  panel(os, 0, 30, w, h, "T cells and macrophages", traj.times,
        {{"Naive", totals(Species::Naive)},
         {"TH1id", totals(Species::TH1id)},
         {"TH2id", totals(Species::TH2id)},
         {"Macrophage", totals(Species::Macrophage)}},
        marks, false);
  panel(os, w, 30, w, h, "Cytokines", traj.times,
        {{"CytA", totals(Species::CytA)}, {"CytB", totals(Species::CytB)}, {"CytC", totals(Species::CytC)}},
        marks, false);
  panel(os, 0, 30 + h, w, h, "Id, anti-id and antigen", traj.times,
        {{"id cells", id}, {"AntiId", totals(Species::AntiId)}, {"Antigen", totals(Species::Antigen)}}, marks,
        false);
  panel(os, w, 30 + h, w, h, "Anti-id against id cells", id, {{"AntiId", totals(Species::AntiId)}}, {}, true);
  os << "</svg>\n";
}

}  // namespace cytonet
