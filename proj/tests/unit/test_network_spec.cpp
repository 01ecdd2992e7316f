#include <doctest.h>

#include <random>

#include "cytonet/calibrate.hpp"
#include "cytonet/error.hpp"
#include "cytonet/network_spec.hpp"
#include "oracles.hpp"

using namespace cytonet;

namespace {

NetworkSpec valid_spec() {
  std::mt19937_64 rng(7);
  return oracle::random_valid_spec(rng);
}

}  // namespace

TEST_CASE("species names round-trip") {
  for (auto s : kAllSpecies) {
    const auto parsed = parse_species(name(s));
    REQUIRE(parsed);
    CHECK(*parsed == s);
  }
  CHECK_FALSE(parse_species("Eosinophil"));
}

TEST_CASE("canonical network has nine species and the canonical origins") {
  const auto s = canonical_network();
  CHECK(s.size() == kSpeciesCount);
  CHECK(s.is_canonical());
  CHECK(s.origin[index(Species::TH1id)] == index(Species::Naive));
  CHECK(s.origin[index(Species::TH2id)] == index(Species::Naive));
  CHECK(s.origin[index(Species::Naive)] == index(Species::Naive));
  CHECK_FALSE(s.origin[index(Species::CytA)]);
  CHECK(validate_spec(s).ok());
}

TEST_CASE("random licensed specs validate") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    const auto s = oracle::random_valid_spec(rng);
    const auto r = validate_spec(s);
    CHECK_MESSAGE(r.ok(), (r.ok() ? "" : r.violations.front().message));
  }
}

TEST_CASE("reference spec is valid") { CHECK(validate_spec(reference_spec()).ok()); }

TEST_CASE("validation catches each kind of violation") {
  SUBCASE("forbidden edge") {
    auto s = valid_spec();
    s.weight(Channel::Interaction, Species::CytA, Species::Antigen) = 1.0;
    CHECK(validate_spec(s).contains(ViolationKind::ForbiddenEdge));
  }
  SUBCASE("sign mismatch") {
    auto s = valid_spec();
    s.weight(Channel::Secretion, Species::CytC, Species::Macrophage) *= -1.0;
    CHECK(validate_spec(s).contains(ViolationKind::SignMismatch));
  }
  SUBCASE("magnitude spread") {
    auto s = valid_spec();
    s.weight(Channel::Secretion, Species::CytC, Species::Macrophage) = 1e3;
    CHECK(validate_spec(s).contains(ViolationKind::MagnitudeSpread));
  }
  SUBCASE("tied weights") {
    auto s = valid_spec();
    s.weight(Channel::Secretion, Species::CytA, Species::TH1id) *= 1.5;
    CHECK(validate_spec(s).contains(ViolationKind::TiedWeightMismatch));
  }
  SUBCASE("lifespan ordering") {
    auto s = valid_spec();
    s.death[static_cast<Eigen::Index>(index(Species::AntiId))] = 5.0;
    CHECK(validate_spec(s).contains(ViolationKind::LifespanOrdering));
  }
  SUBCASE("non-positive death") {
    auto s = valid_spec();
    s.death[static_cast<Eigen::Index>(index(Species::CytB))] = 0.0;
    CHECK(validate_spec(s).contains(ViolationKind::NonPositiveDeath));
  }
  SUBCASE("negative source") {
    auto s = valid_spec();
    s.source[0] = -1.0;
    CHECK(validate_spec(s).contains(ViolationKind::NegativeSource));
  }
  SUBCASE("non-finite") {
    auto s = valid_spec();
    s.w2(5, 1) = std::numeric_limits<double>::infinity();
    CHECK(validate_spec(s).contains(ViolationKind::NonFinite));
  }
  SUBCASE("origin on a mediator") {
    auto s = valid_spec();
    s.origin[index(Species::CytA)] = index(Species::Naive);
    CHECK(validate_spec(s).contains(ViolationKind::Origin));
  }
  SUBCASE("roster size") {
    auto s = valid_spec();
    s.death.resize(3);
    CHECK(validate_spec(s).contains(ViolationKind::Roster));
  }
  SUBCASE("require_valid throws") {
    auto s = valid_spec();
    s.death[0] = -1.0;
    CHECK_THROWS_AS(require_valid(s), ValidationError);
  }
}

TEST_CASE("optional edge may be absent but not negative") {
  auto s = valid_spec();
  s.weight(Channel::Secretion, Species::CytA, Species::AntiId) = 0.0;
  CHECK(validate_spec(s).ok());
  s.weight(Channel::Secretion, Species::CytA, Species::AntiId) = -1.0;
  CHECK(validate_spec(s).contains(ViolationKind::SignMismatch));
}

TEST_CASE("signed adjacency maps weight [i, j] to edge j -> i") {
  const auto s = valid_spec();
  const auto g = signed_adjacency(s);
  CHECK(g.size() == kSpeciesCount);
  std::size_t nonzero = 0;
  for (auto c : {Channel::Interaction, Channel::Differentiation, Channel::Secretion}) {
    nonzero += static_cast<std::size_t>((s.matrix(c).array() != 0.0).count());
  }
  CHECK(g.edges.size() == nonzero);
  const auto anti = index(Species::AntiId);
  const auto th1 = index(Species::TH1id);
  CHECK(g.has_edge(anti, th1, -1));
  CHECK(g.has_edge(th1, anti, +1));
  CHECK_FALSE(g.has_edge(th1, anti, -1));
}

TEST_CASE("signed adjacency rejects an invalid spec") {
  auto s = valid_spec();
  s.death[1] = 0.0;
  CHECK_THROWS_AS(signed_adjacency(s), ValidationError);
}

TEST_CASE("spec equality is exact") {
  const auto a = valid_spec();
  auto b = a;
  CHECK(a == b);
  b.w(0, 7) = std::nextafter(b.w(0, 7), 1e9);
  CHECK_FALSE(a == b);
}
