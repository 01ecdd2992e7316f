#include "cytonet/calibrate.hpp"

#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "cytonet/error.hpp"
#include "cytonet/io.hpp"
#include "reference_spec_text.hpp"

namespace cytonet {

namespace {

using S = Species;
using C = Channel;

// Uniform double in [0, 1) from the top 53 bits; std distributions are not
// portable across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = unit(rng);
  return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
}

int licensed_sign(const WeightRef& r) {
  for (const auto& e : sign_table()) {
    if (e.channel == r.channel && e.target == r.target && e.source == r.source) return e.sign;
  }
  throw PreconditionError("free parameter targets an unlicensed weight");
}

}  // namespace

CalibrationConstraints reference_constraints() {
  CalibrationConstraints c;
  // Each box spans less than a decade around the accepted region.
  c.weights = {
      {"naive_by_cytc", {{C::Interaction, S::Naive, S::CytC}}, 1.743, 1.814},
      {"antiid_on_naive", {{C::Interaction, S::Naive, S::AntiId}}, 2.539, 2.643},
      {"antiid_on_th", {{C::Interaction, S::TH1id, S::AntiId}, {C::Interaction, S::TH2id, S::AntiId}}, 4.078, 4.245},
      {"naive_to_antiid", {{C::Interaction, S::AntiId, S::Naive}}, 0.3229, 0.336},
      {"th1_to_antiid", {{C::Interaction, S::AntiId, S::TH1id}}, 0.3824, 0.398},
      {"th2_to_antiid", {{C::Interaction, S::AntiId, S::TH2id}}, 8.484, 8.831},
      {"cytb_on_antiid", {{C::Interaction, S::AntiId, S::CytB}}, 0.5899, 0.614},
      {"cyta_to_macrophage", {{C::Interaction, S::Macrophage, S::CytA}}, 5.78, 6.016},
      {"cytb_on_macrophage", {{C::Interaction, S::Macrophage, S::CytB}}, 0.341, 0.355},
      {"antigen_to_naive", {{C::Differentiation, S::Naive, S::Antigen}}, 0.1632, 0.1699},
      {"own_cytokine_drive", {{C::Differentiation, S::TH1id, S::CytA}, {C::Differentiation, S::TH2id, S::CytB}}, 8.734, 9.091},
      {"cytc_to_th1", {{C::Differentiation, S::TH1id, S::CytC}}, 2.063, 2.147},
      {"cross_cytokine_drive", {{C::Differentiation, S::TH1id, S::CytB}, {C::Differentiation, S::TH2id, S::CytA}}, 1.062, 1.106},
      {"cytc_on_th2", {{C::Differentiation, S::TH2id, S::CytC}}, 0.1384, 0.1441},
      {"naive_to_th2", {{C::Differentiation, S::TH2id, S::Naive}}, 0.98, 1.02},
      {"own_secretion", {{C::Secretion, S::CytA, S::TH1id}, {C::Secretion, S::CytB, S::TH2id}}, 8.734, 9.091},
      {"macrophage_secretion", {{C::Secretion, S::CytC, S::Macrophage}}, 0.1805, 0.1879},
      {"cross_secretion", {{C::Secretion, S::CytA, S::TH2id}, {C::Secretion, S::CytB, S::TH1id}}, 0.1384, 0.1441},
      {"cytokine_cross_inhibition", {{C::Secretion, S::CytA, S::CytB}, {C::Secretion, S::CytB, S::CytA}}, 0.1384, 0.1441},
  };
  c.rates = {
      {"death_naive", FreeRate::Target::Death, {S::Naive}, 0.3676, 0.3826},
      {"death_th", FreeRate::Target::Death, {S::TH1id, S::TH2id}, 0.7213, 0.7507},
      {"death_antiid", FreeRate::Target::Death, {S::AntiId}, 0.2718, 0.2829},
      {"death_macrophage", FreeRate::Target::Death, {S::Macrophage}, 0.801, 0.8337},
      {"death_antigen", FreeRate::Target::Death, {S::Antigen}, 0.098, 0.102},
      {"source_naive", FreeRate::Target::Source, {S::Naive}, 0.0688, 0.0716},
  };
  return c;
}

std::size_t Scorecard::passed() const noexcept {
  std::size_t n = (valid ? 1 : 0) + (bistable ? 1 : 0) + (ordering ? 1 : 0);
  for (const auto& [name, ok] : scenarios) n += ok ? 1 : 0;
  return n;
}

std::size_t Scorecard::total() const noexcept { return 3 + builtin_scenarios().size(); }

CalibrationError::CalibrationError(const std::string& message, Scorecard best)
    : Error(message), best_(std::move(best)) {}

NetworkSpec draw_candidate(const CalibrationConstraints& c, std::uint64_t seed, std::size_t candidate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(candidate), static_cast<std::uint32_t>(candidate >> 32)};
  std::mt19937_64 rng(seq);
  NetworkSpec spec = canonical_network();
  for (const auto& p : c.weights) {
    if (!(p.lo > 0.0) || !(p.hi >= p.lo)) throw PreconditionError("bad search box for " + p.name);
    const double v = log_uniform(rng, p.lo, p.hi);
    for (const auto& r : p.targets) {
      int sign = licensed_sign(r);
      for (const auto& [ref, s] : c.sign_overrides) {
        if (ref.channel == r.channel && ref.target == r.target && ref.source == r.source) sign = s;
      }
      spec.weight(r.channel, r.target, r.source) = sign * v;
    }
  }
  for (const auto& r : c.rates) {
    if (!(r.lo > 0.0) || !(r.hi >= r.lo)) throw PreconditionError("bad search box for " + r.name);
    const double v = log_uniform(rng, r.lo, r.hi);
    for (auto s : r.species) {
      auto& vec = r.target == FreeRate::Target::Death ? spec.death : spec.source;
      vec[static_cast<Eigen::Index>(index(s))] = v;
    }
  }
  return spec;
}

Scorecard score_candidate(const NetworkSpec& spec, const RunOptions& run) {
  Scorecard card;
  const auto scenarios = builtin_scenarios();
  for (const auto& sc : scenarios) card.scenarios.emplace_back(sc.name, false);
  card.valid = validate_spec(spec).ok();
  if (!card.valid) return card;
  ScenarioContext ctx;
  try {
    ctx = ScenarioContext::prepare(spec);
  } catch (const Error&) {
    return card;
  }
  card.bistable = true;
  card.ordering = th2_state_is_lower(ctx.spec, ctx.steady);
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    try {
      card.scenarios[i].second = run_scenario(ctx, scenarios[i], run).passed;
    } catch (const DivergenceError&) {
      card.scenarios[i].second = false;
    }
  }
  return card;
}

CalibrationResult calibrate(const CalibrationConstraints& c, const CalibrationOptions& options) {
  if (options.budget == 0) throw CalibrationError("search budget is zero", Scorecard{});
  const std::size_t workers = std::max<std::size_t>(1, options.workers);
  std::optional<Scorecard> best;
  for (std::size_t base = 0; base < options.budget; base += workers) {
    const std::size_t n = std::min(workers, options.budget - base);
    std::vector<NetworkSpec> specs(n);
    std::vector<Scorecard> cards(n);
    std::vector<std::exception_ptr> errors(n);
    auto work = [&](std::size_t k) {
      try {
        specs[k] = draw_candidate(c, options.seed, base + k);
        cards[k] = score_candidate(specs[k], options.run);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    };
    if (n == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t k = 0; k < n; ++k) pool.emplace_back(work, k);
    }
    // Lowest index wins, so the outcome does not depend on the worker count.
    for (std::size_t k = 0; k < n; ++k) {
      if (errors[k]) std::rethrow_exception(errors[k]);
      if (cards[k].all()) return {specs[k], options.seed, base + k + 1, cards[k]};
      if (!best || cards[k].passed() > best->passed()) best = cards[k];
    }
  }
  throw CalibrationError("no candidate passed within a budget of " + std::to_string(options.budget) +
                             " (best " + std::to_string(best->passed()) + "/" +
                             std::to_string(best->total()) + ")",
                         *best);
}

const NetworkSpec& reference_spec() {
  static const NetworkSpec spec = read_spec(kReferenceSpecText, "reference_spec.cnet");
  return spec;
}

}  // namespace cytonet
