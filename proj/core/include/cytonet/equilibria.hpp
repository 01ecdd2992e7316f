#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cytonet/error.hpp"
#include "cytonet/network_spec.hpp"
#include "cytonet/state.hpp"

namespace cytonet {

enum class Phenotype : std::uint8_t { TH1, TH2, Other };

std::string_view name(Phenotype p) noexcept;
std::optional<Phenotype> parse_phenotype(std::string_view text) noexcept;

inline constexpr double kDefaultDominanceRatio = 2.0;

/// TH1 when total CytA exceeds ratio * total CytB, TH2 for the converse,
/// Other otherwise. Sub-species produced by a redundancy split are summed.
Phenotype classify(const NetworkSpec& spec, const Eigen::VectorXd& x,
                   double dominance_ratio = kDefaultDominanceRatio);

enum class Stability : std::uint8_t { Stable, Unstable, Indeterminate };

std::string_view name(Stability s) noexcept;

struct StabilityResult {
  double leading_eigen_real = 0.0;
  Stability verdict = Stability::Indeterminate;
  /// A central Jacobian probe pair straddled a clamp switch.
  bool nonsmooth = false;
  Eigen::VectorXcd eigenvalues;
};

/// Finite-difference Jacobian of rhs, step 1e-6 * (1 + |x_i|), one-sided
/// towards the interior at boundary components.
Eigen::MatrixXd jacobian(const NetworkSpec& spec, const Eigen::VectorXd& x);

/// Leading real part of the Jacobian spectrum at a steady state. Values
/// within +-1e-8 of zero, and non-smooth points, are Indeterminate.
StabilityResult stability(const NetworkSpec& spec, const Eigen::VectorXd& x);

enum class SolveMethod : std::uint8_t { Newton, Integration };

struct SteadyStateReport {
  State state;
  double residual = 0.0;
  bool converged = false;
  bool stable = false;
  StabilityResult stability;
  Phenotype label = Phenotype::Other;
  SolveMethod method = SolveMethod::Newton;
  std::size_t iterations = 0;
};

struct SteadyStateOptions {
  std::size_t max_iterations = 200;
  std::size_t max_halvings = 30;
  /// Time budget of the integration fallback.
  double fallback_horizon = 500.0;
  double dt = 1e-3;
  double dominance_ratio = kDefaultDominanceRatio;
};

/// Raised when neither Newton nor the integration fallback reach `tol`.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, SteadyStateReport best);
  const SteadyStateReport& best() const noexcept { return best_; }

 private:
  SteadyStateReport best_;
};

/// Damped Newton on rhs with a finite-difference Jacobian, iterates projected
/// onto the non-negative orthant. Falls back to integration (with a Newton
/// polish) on stagnation.
SteadyStateReport find_steady_state(const NetworkSpec& spec, const State& guess, double tol,
                                    const SteadyStateOptions& options = {});

/// Pure Newton path, without fallback. Returns nullopt on stagnation.
std::optional<SteadyStateReport> newton_steady_state(const NetworkSpec& spec,
                                                     const State& guess, double tol,
                                                     const SteadyStateOptions& options = {});

/// Pure integration path: simulate until the residual is below `tol` or the
/// horizon runs out.
std::optional<SteadyStateReport> integrate_to_steady_state(const NetworkSpec& spec,
                                                           const State& guess, double tol,
                                                           const SteadyStateOptions& options = {});

struct BistabilityCertificate {
  SteadyStateReport th2;
  SteadyStateReport th1;
};

class CertificateError : public Error {
 public:
  CertificateError(const std::string& message, std::vector<SteadyStateReport> found);
  const std::vector<SteadyStateReport>& found() const noexcept { return found_; }

 private:
  std::vector<SteadyStateReport> found_;
};

inline constexpr double kCertificateTolerance = 1e-10;
/// Certified states need a dominant cytokine total above this level; fainter
/// states are counted as Other.
inline constexpr double kCertificateCytokineFloor = 1e-6;

/// Starting points probed by the certificate search, in order.
std::vector<State> certificate_guesses(const NetworkSpec& spec);

/// Finds one stable TH2 and one stable TH1 steady state. Each guess is relaxed
/// by integration and then polished by Newton; per label the lowest-residual
/// report wins. Throws CertificateError naming the missing label(s).
BistabilityCertificate bistability_certificate(const NetworkSpec& spec,
                                               const SteadyStateOptions& options = {});

/// Naive + TH1id + TH2id (summed over split rosters).
double id_aggregate(const NetworkSpec& spec, const Eigen::VectorXd& x);

/// Total concentration of every species carrying `role`.
double role_total(const NetworkSpec& spec, const Eigen::VectorXd& x, Species role);

/// Id aggregate and AntiId both strictly lower in the TH2 state.
bool th2_state_is_lower(const NetworkSpec& spec, const BistabilityCertificate& cert);

}  // namespace cytonet
