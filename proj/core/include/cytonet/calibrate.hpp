#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cytonet/network_spec.hpp"
#include "cytonet/scenarios.hpp"

namespace cytonet {

/// One free magnitude of the search. Every weight listed in `targets` is set
/// to `sign(target) * value`, which is how tied groups stay bit-identical.
struct FreeParameter {
  std::string name;
  std::vector<WeightRef> targets;
  double lo = 0.0;
  double hi = 0.0;
};

/// Death rates and the naive influx are searched like weights but live
/// outside the weight matrices.
struct FreeRate {
  std::string name;
  enum class Target : std::uint8_t { Death, Source } target = Target::Death;
  std::vector<Species> species;
  double lo = 0.0;
  double hi = 0.0;
};

struct CalibrationConstraints {
  std::vector<FreeParameter> weights;
  std::vector<FreeRate> rates;
  /// Overrides the sign of selected licensed edges (sensitivity runs).
  std::vector<std::pair<WeightRef, int>> sign_overrides;
};

/// Search box used to produce the reference network: the sign table, tied
/// groups and lifespan ordering, with each magnitude's range inside one
/// decade.
CalibrationConstraints reference_constraints();

struct Scorecard {
  bool valid = false;
  bool bistable = false;
  bool ordering = false;
  std::vector<std::pair<std::string, bool>> scenarios;

  std::size_t passed() const noexcept;
  std::size_t total() const noexcept;
  bool all() const noexcept { return passed() == total(); }
};

struct CalibrationOptions {
  std::uint64_t seed = 0;
  std::size_t budget = 64;
  RunOptions run;
  std::size_t workers = 1;
};

struct CalibrationResult {
  NetworkSpec spec;
  std::uint64_t seed = 0;
  /// 1-based index of the accepted candidate.
  std::size_t candidate = 0;
  Scorecard scorecard;
};

class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& message, Scorecard best);
  const Scorecard& best() const noexcept { return best_; }

 private:
  Scorecard best_;
};

/// Draws candidate `index` (0-based) of the seeded search. Pure.
NetworkSpec draw_candidate(const CalibrationConstraints& c, std::uint64_t seed, std::size_t index);

/// Scores a candidate against the acceptance conditions.
Scorecard score_candidate(const NetworkSpec& spec, const RunOptions& run = {});

/// Seeded random search; accepts the first candidate whose scorecard is
/// complete. Throws CalibrationError (carrying the best scorecard) when the
/// budget runs out.
CalibrationResult calibrate(const CalibrationConstraints& c, const CalibrationOptions& options);

/// Seed whose accepted candidate is the shipped reference network.
inline constexpr std::uint64_t kReferenceSeed = 3;

/// The committed reference network (also shipped as data/reference_spec.cnet).
const NetworkSpec& reference_spec();

}  // namespace cytonet
