#include <doctest.h>

#include <cmath>
#include <random>

#include "cytonet/calibrate.hpp"
#include "cytonet/dynamics.hpp"
#include "cytonet/error.hpp"
#include "cytonet/scenarios.hpp"
#include "oracles.hpp"

using namespace cytonet;

namespace {

Eigen::VectorXd random_state(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

// All weights zero: every species decays towards source / death.
NetworkSpec decay_only() {
  auto s = canonical_network();
  for (Eigen::Index i = 0; i < 9; ++i) s.death[i] = 0.3 + 0.2 * static_cast<double>(i);
  s.death[3] = 0.2;
  s.source[0] = 0.7;
  return s;
}

double decay_exact(double x0, double d, double src, double t) {
  return x0 * std::exp(-d * t) + src / d * (1.0 - std::exp(-d * t));
}

constexpr Eigen::Index kA = static_cast<Eigen::Index>(index(Species::CytA));

}  // namespace

TEST_CASE("rhs matches the term-by-term oracle") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    auto s = oracle::random_valid_spec(rng);
    if (k % 2 == 1) s.clamp = ClampMode::DifferentiationOnly;
    const auto x = random_state(rng, 9);
    const Eigen::VectorXd got = rhs(s, x);
    const Eigen::VectorXd want = oracle::rate(s, x);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + want.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("rhs with forcing adds inflow and extra decay") {
  std::mt19937_64 rng(12);
  const auto s = oracle::random_valid_spec(rng);
  const auto x = random_state(rng, 9);
  auto f = Forcing::none(9);
  f.inflow[kA] = 2.0;
  f.extra_decay[kA] = 0.5;
  const auto base = rhs(s, x);
  const auto forced = rhs(s, x, f);
  CHECK(forced[kA] == doctest::Approx(base[kA] + 2.0 - 0.5 * x[kA]));
  CHECK(oracle::rate(s, x, f.inflow, f.extra_decay)[kA] == doctest::Approx(forced[kA]));
}

TEST_CASE("rhs rejects negative or mismatched states") {
  const auto s = decay_only();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(9);
  x[2] = -1e-12;
  CHECK_THROWS_AS(rhs(s, x), PreconditionError);
  CHECK_THROWS_AS(rhs(s, Eigen::VectorXd::Ones(4)), PreconditionError);
  x[2] = std::nan("");
  CHECK_THROWS_AS(rhs(s, x), PreconditionError);
}

TEST_CASE("production is clamped at zero") {
  auto s = canonical_network();
  s.weight(Channel::Secretion, Species::CytA, Species::TH2id) = -2.0;
  s.weight(Channel::Secretion, Species::CytA, Species::TH1id) = 1.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(9);
  x[1] = 1.0;
  x[2] = 1.0;
  x[kA] = 0.4;
  CHECK(production(s, x, index(Species::CytA)) == 0.0);
  CHECK(rhs(s, x)[kA] == doctest::Approx(-0.4));
  x[2] = 0.25;
  CHECK(production(s, x, index(Species::CytA)) == doctest::Approx(0.5));
}

TEST_CASE("differentiation-only clamp lets suppression pull below zero production") {
  auto s = canonical_network();
  s.weight(Channel::Interaction, Species::TH1id, Species::AntiId) = -1.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(9);
  x[1] = 2.0;
  x[3] = 1.0;
  CHECK(production(s, x, 1) == 0.0);
  s.clamp = ClampMode::DifferentiationOnly;
  CHECK(production(s, x, 1) == doctest::Approx(-2.0));
}

TEST_CASE("knocked-out species only decay") {
  std::mt19937_64 rng(13);
  const auto s = apply_knockout(oracle::random_valid_spec(rng), index(Species::CytA));
  const auto x = random_state(rng, 9);
  CHECK(production(s, x, index(Species::CytA)) == 0.0);
  CHECK(rhs(s, x)[kA] == doctest::Approx(-s.death[kA] * x[kA]));
}

TEST_CASE("decay-only system follows the closed form") {
  const auto s = decay_only();
  Eigen::VectorXd x0 = Eigen::VectorXd::LinSpaced(9, 0.5, 4.5);
  StepControl c;
  c.dt = 1e-3;
  c.t_end = 5.0;
  c.record_every = 1000;
  const auto tr = simulate(s, State{x0, 0.0}, c);
  REQUIRE(tr.size() == 6);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    for (Eigen::Index i = 0; i < 9; ++i) {
      const double want = decay_exact(x0[i], s.death[i], s.source[i], tr.times[k]);
      CHECK(tr.states[k][i] == doctest::Approx(want).epsilon(1e-6));
    }
  }
}

TEST_CASE("Heun is second order on the decay problem") {
  const auto s = decay_only();
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(9, 2.0);
  std::vector<double> errors;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
    StepControl c;
    c.dt = dt;
    c.t_end = 2.0;
    c.record_every = 1000000;
    const auto x = simulate(s, State{x0, 0.0}, c).states.back();
    double err = 0.0;
    for (Eigen::Index i = 0; i < 9; ++i) {
      err = std::max(err, std::abs(x[i] - decay_exact(x0[i], s.death[i], s.source[i], 2.0)));
    }
    errors.push_back(err);
  }
  for (std::size_t k = 1; k < errors.size(); ++k) {
    const double ratio = errors[k - 1] / errors[k];
    CHECK(ratio >= 3.6);
    CHECK(ratio <= 4.4);
  }
}

TEST_CASE("bolus acts exactly at an off-grid time") {
  const auto s = decay_only();
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(9);
  StepControl c;
  c.dt = 0.01;
  c.t_end = 1.0;
  const double tb = 0.4567;
  const auto tr = simulate(s, State{x0, 0.0}, c,
                           EventSchedule({{EventKind::Bolus, index(Species::TH1id), tb, 0.0, 3.0}}));
  REQUIRE(tr.events.size() == 1);
  CHECK(tr.events[0].after[1] - tr.events[0].before[1] == doctest::Approx(3.0));
  const double d = s.death[1];
  const double want = (std::exp(-d * tb) + 3.0) * std::exp(-d * (1.0 - tb));
  CHECK(tr.states.back()[1] == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("infusion window with off-grid edges matches the closed form") {
  const auto s = decay_only();
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(9);
  StepControl c;
  c.dt = 0.01;
  c.t_end = 3.0;
  const double a = 0.123, b = 1.789, r = 2.0;
  const auto tr = simulate(s, State{x0, 0.0}, c, EventSchedule({{EventKind::Infusion, 5, a, b - a, r}}));
  const double d = s.death[5];
  const double want = r / d * (1.0 - std::exp(-d * (b - a))) * std::exp(-d * (3.0 - b));
  CHECK(tr.states.back()[5] == doctest::Approx(want).epsilon(1e-5));
}

TEST_CASE("blockade adds first-order removal") {
  const auto s = decay_only();
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(9);
  StepControl c;
  c.dt = 1e-3;
  c.t_end = 2.0;
  const auto tr = simulate(s, State{x0, 0.0}, c, EventSchedule({{EventKind::Blockade, 6, 0.0, 2.0, 1.5}}));
  CHECK(tr.states.back()[6] == doctest::Approx(std::exp(-(s.death[6] + 1.5) * 2.0)).epsilon(1e-6));
}

TEST_CASE("knockout event zeroes the mediator and stops its production") {
  std::mt19937_64 rng(5);
  const auto s = oracle::random_valid_spec(rng);
  StepControl c;
  c.dt = 1e-3;
  c.t_end = 4.0;
  const auto tr = simulate(s, State{Eigen::VectorXd::Ones(9), 0.0}, c,
                           EventSchedule({{EventKind::Knockout, index(Species::CytA), 1.0, 0.0, 0.0}}));
  REQUIRE(tr.events.size() == 1);
  CHECK(tr.events[0].after[kA] == 0.0);
  CHECK(tr.states.back()[kA] == 0.0);
}

TEST_CASE("simulate validates its inputs") {
  const auto s = decay_only();
  const State s0{Eigen::VectorXd::Ones(9), 0.0};
  StepControl c;
  c.t_end = 1.0;
  CHECK_THROWS_AS(simulate(s, s0, c, EventSchedule({{EventKind::Bolus, 0, 2.0, 0.0, 1.0}})),
                  PreconditionError);
  c.dt = 0.0;
  CHECK_THROWS_AS(simulate(s, s0, c), PreconditionError);
  c.dt = 0.1;
  c.record_every = 0;
  CHECK_THROWS_AS(simulate(s, s0, c), PreconditionError);
  c.record_every = 1;
  CHECK_THROWS_AS(simulate(s, s0, c, EventSchedule({{EventKind::Bolus, 0, 0.5, 0.0, -1.0}})),
                  ValidationError);
}

TEST_CASE("recording keeps the start, every stride and the end") {
  const auto s = decay_only();
  StepControl c;
  c.dt = 0.1;
  c.t_end = 1.05;
  c.record_every = 3;
  const auto tr = simulate(s, State{Eigen::VectorXd::Ones(9), 0.0}, c);
  // 11 grid steps (the last one shortened): samples at 0, 3, 6, 9 steps and the end.
  REQUIRE(tr.size() == 5);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times[1] == doctest::Approx(0.3));
  CHECK(tr.times.back() == doctest::Approx(1.05));
}

TEST_CASE("runaway growth raises DivergenceError") {
  auto s = canonical_network();
  s.w(3, 3) = 5.0;
  StepControl c;
  c.dt = 0.1;
  c.t_end = 100.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(9);
  x[3] = 10.0;
  CHECK_THROWS_AS(simulate(s, State{x, 0.0}, c), DivergenceError);
}

TEST_CASE("states stay non-negative under harsh forcing") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 20; ++k) {
    const auto s = oracle::random_valid_spec(rng);
    StepControl c;
    c.dt = 0.01;
    c.t_end = 1.0;
    c.record_every = 1;
    const auto tr = simulate(s, State{random_state(rng, 9), 0.0}, c,
                             EventSchedule({{EventKind::Blockade, 5, 0.0, 1.0, 100.0},
                                            {EventKind::Blockade, 1, 0.2, 0.5, 50.0}}));
    for (const auto& x : tr.states) CHECK(is_nonnegative(x));
  }
}

TEST_CASE("Heun agrees with a fine Euler oracle through a bolus") {
  const auto ctx = ScenarioContext::prepare(reference_spec());
  const Eigen::VectorXd x0 = ctx.steady.th2.state.x;
  const Event bolus{EventKind::Bolus, index(Species::TH1id), 0.5, 0.0, 1.0};
  StepControl c;
  c.dt = 1e-3;
  c.t_end = 3.0;
  c.record_every = 500;
  const auto tr = simulate(ctx.spec, State{x0, 0.0}, c, EventSchedule({bolus}));
  const auto ref = oracle::Euler(ctx.spec).run(x0, 0.0, 1e-6, 3000000, 500000, {bolus});
  REQUIRE(ref.size() == tr.size());
  for (Eigen::Index i = 0; i < 9; ++i) {
    double scale = 0.0, err = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      scale = std::max(scale, std::abs(ref[k][i]));
      err = std::max(err, std::abs(ref[k][i] - tr.states[k][i]));
    }
    CHECK(err <= 1e-3 * std::max(scale, 1e-12));
  }
}
