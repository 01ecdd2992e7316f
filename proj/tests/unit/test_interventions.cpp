#include <doctest.h>

#include <random>

#include "cytonet/error.hpp"
#include "cytonet/interventions.hpp"
#include "oracles.hpp"

using namespace cytonet;

namespace {

NetworkSpec spec() {
  std::mt19937_64 rng(3);
  return oracle::random_valid_spec(rng);
}

constexpr std::size_t kCytA = index(Species::CytA);
constexpr std::size_t kCytB = index(Species::CytB);
constexpr std::size_t kTH1 = index(Species::TH1id);

}  // namespace

TEST_CASE("event kind names round-trip") {
  for (auto k : {EventKind::Bolus, EventKind::Infusion, EventKind::Blockade, EventKind::Knockout}) {
    const auto p = parse_event_kind(name(k));
    REQUIRE(p);
    CHECK(*p == k);
  }
  CHECK_FALSE(parse_event_kind("vaccine"));
}

TEST_CASE("event validation") {
  const auto s = spec();
  CHECK_NOTHROW(validate_event(s, {EventKind::Bolus, kTH1, 1.0, 0.0, 2.0}));
  CHECK_NOTHROW(validate_event(s, {EventKind::Infusion, kCytA, 1.0, 3.0, 2.0}));
  CHECK_NOTHROW(validate_event(s, {EventKind::Blockade, kCytB, 0.0, 3.0, 0.5}));
  CHECK_NOTHROW(validate_event(s, {EventKind::Knockout, kCytA, 5.0, 0.0, 0.0}));

  CHECK_THROWS_AS(validate_event(s, {EventKind::Bolus, kTH1, 1.0, 0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate_event(s, {EventKind::Bolus, kTH1, 1.0, 1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(validate_event(s, {EventKind::Bolus, kTH1, -1.0, 0.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(validate_event(s, {EventKind::Infusion, kCytA, 1.0, 0.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(validate_event(s, {EventKind::Infusion, kCytA, 1.0, 1.0, -2.0}), ValidationError);
  CHECK_THROWS_AS(validate_event(s, {EventKind::Blockade, kCytB, 1.0, 1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate_event(s, {EventKind::Knockout, kTH1, 1.0, 0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate_event(s, {EventKind::Bolus, 99, 1.0, 0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate_event(s, {EventKind::Bolus, kTH1, std::nan(""), 0.0, 1.0}), ValidationError);
}

TEST_CASE("window events act on a half-open interval") {
  const Event e{EventKind::Infusion, kCytA, 2.0, 3.0, 1.0};
  CHECK_FALSE(e.covers(1.999));
  CHECK(e.covers(2.0));
  CHECK(e.covers(4.999));
  CHECK_FALSE(e.covers(5.0));
  const Event b{EventKind::Bolus, kCytA, 2.0, 0.0, 1.0};
  CHECK_FALSE(b.covers(2.0));
}

TEST_CASE("schedules must be time ordered") {
  std::vector<Event> evs{{EventKind::Bolus, kTH1, 5.0, 0.0, 1.0}, {EventKind::Bolus, kTH1, 1.0, 0.0, 1.0}};
  CHECK_THROWS_AS(EventSchedule{evs}, PreconditionError);
  const auto s = EventSchedule::sorted(evs);
  REQUIRE(s.size() == 2);
  CHECK(s.events()[0].time == 1.0);
  CHECK(s.events()[1].time == 5.0);
}

TEST_CASE("active_at returns covering windows only") {
  const auto s = EventSchedule::sorted({{EventKind::Infusion, kCytA, 0.0, 2.0, 1.0},
                                        {EventKind::Bolus, kTH1, 1.0, 0.0, 1.0},
                                        {EventKind::Blockade, kCytB, 1.5, 2.0, 1.0}});
  CHECK(s.active_at(1.0).size() == 1);
  CHECK(s.active_at(1.7).size() == 2);
  CHECK(s.active_at(3.0).size() == 1);
  CHECK(s.active_at(4.0).empty());
}

TEST_CASE("bolus adds the dose to one component") {
  State st{Eigen::VectorXd::Constant(9, 0.5), 3.0};
  const auto out = apply_bolus(st, kTH1, 2.0);
  CHECK(out.x[static_cast<Eigen::Index>(kTH1)] == doctest::Approx(2.5));
  CHECK(out.t == 3.0);
  CHECK((out.x - st.x).cwiseAbs().sum() == doctest::Approx(2.0));
  CHECK_THROWS_AS(apply_bolus(st, kTH1, 0.0), PreconditionError);
  CHECK_THROWS_AS(apply_bolus(st, 42, 1.0), PreconditionError);
}

TEST_CASE("effective rates sum overlapping windows") {
  const auto s = spec();
  const std::vector<Event> active{{EventKind::Infusion, kCytA, 0.0, 1.0, 1.5},
                                  {EventKind::Infusion, kCytA, 0.0, 1.0, 0.5},
                                  {EventKind::Blockade, kCytB, 0.0, 1.0, 0.25},
                                  {EventKind::Bolus, kTH1, 0.0, 0.0, 9.0}};
  const auto f = effective_rates(s, active);
  CHECK(f.inflow[static_cast<Eigen::Index>(kCytA)] == doctest::Approx(2.0));
  CHECK(f.extra_decay[static_cast<Eigen::Index>(kCytB)] == doctest::Approx(0.25));
  CHECK(f.inflow.sum() == doctest::Approx(2.0));
  CHECK(f.extra_decay.sum() == doctest::Approx(0.25));
}

TEST_CASE("knockout removes production but keeps outgoing edges") {
  const auto s = spec();
  const auto k = apply_knockout(s, kCytA);
  const auto i = static_cast<Eigen::Index>(kCytA);
  CHECK(k.knocked_out[kCytA]);
  CHECK(k.w.row(i).isZero());
  CHECK(k.w1.row(i).isZero());
  CHECK(k.w2.row(i).isZero());
  CHECK(k.source[i] == 0.0);
  CHECK(k.w.col(i) == s.w.col(i));
  CHECK(k.w1.col(i) == s.w1.col(i));
  CHECK(k.w2.col(i) == s.w2.col(i));
  CHECK(validate_spec(k).ok());
  CHECK_THROWS_AS(apply_knockout(s, kTH1), PreconditionError);
}
