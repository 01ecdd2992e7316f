#include "cytonet/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "cytonet/dynamics.hpp"

namespace cytonet {

namespace {

constexpr double kZeroBand = 1e-8;
// Integration chunk between residual checks of the fallback path.
constexpr double kRelaxChunk = 10.0;

double residual_of(const NetworkSpec& spec, const Eigen::VectorXd& x) {
  Eigen::VectorXd f;
  rhs_into(spec, x, nullptr, f);
  return f.lpNorm<Eigen::Infinity>();
}

// Clamp pattern: which clamp arguments are strictly positive.
std::vector<int> clamp_pattern(const ClampTrace& tr) {
  std::vector<int> p;
  p.reserve(static_cast<std::size_t>(2 * tr.inner.size()));
  for (Eigen::Index i = 0; i < tr.inner.size(); ++i) {
    p.push_back(std::isnan(tr.inner[i]) ? -1 : (tr.inner[i] > 0.0 ? 1 : 0));
    p.push_back(std::isnan(tr.outer[i]) ? -1 : (tr.outer[i] > 0.0 ? 1 : 0));
  }
  return p;
}

// Finite-difference Jacobian. Reports a non-smooth point when a central
// probe pair straddles a clamp switch. One-sided probes at the orthant
// boundary already give the derivative from the feasible side.
Eigen::MatrixXd fd_jacobian(const NetworkSpec& spec, const Eigen::VectorXd& x, bool* nonsmooth) {
  const auto n = x.size();
  Eigen::MatrixXd jac(n, n);
  Eigen::VectorXd f0;
  rhs_into(spec, x, nullptr, f0);
  bool crossed = false;
  Eigen::VectorXd xp = x;
  Eigen::VectorXd xm = x;
  Eigen::VectorXd fp;
  Eigen::VectorXd fm;
  ClampTrace tp;
  ClampTrace tm;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(x[j]));
    xp[j] = x[j] + h;
    rhs_into(spec, xp, nullptr, fp, &tp);
    if (x[j] - h >= 0.0) {
      xm[j] = x[j] - h;
      rhs_into(spec, xm, nullptr, fm, &tm);
      crossed = crossed || clamp_pattern(tp) != clamp_pattern(tm);
      jac.col(j) = (fp - fm) / (2.0 * h);
      xm[j] = x[j];
    } else {
      jac.col(j) = (fp - f0) / h;
    }
    xp[j] = x[j];
  }
  if (nonsmooth != nullptr) *nonsmooth = crossed;
  return jac;
}

SteadyStateReport make_report(const NetworkSpec& spec, const Eigen::VectorXd& x, double t,
                              double tol, SolveMethod method, std::size_t iterations,
                              const SteadyStateOptions& options) {
  SteadyStateReport r;
  r.state = State{x, t};
  r.residual = residual_of(spec, x);
  r.converged = r.residual < tol;
  r.stability = stability(spec, x);
  r.stable = r.stability.verdict == Stability::Stable;
  r.label = classify(spec, x, options.dominance_ratio);
  r.method = method;
  r.iterations = iterations;
  return r;
}

void check_guess(const NetworkSpec& spec, const State& guess, double tol) {
  require_valid(spec);
  if (static_cast<std::size_t>(guess.x.size()) != spec.size() || !is_nonnegative(guess.x)) {
    throw PreconditionError("steady-state guess must be non-negative and match the spec");
  }
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be > 0");
}

}  // namespace

std::string_view name(Phenotype p) noexcept {
  switch (p) {
    case Phenotype::TH1:
      return "TH1";
    case Phenotype::TH2:
      return "TH2";
    case Phenotype::Other:
      return "Other";
  }
  return "?";
}

std::optional<Phenotype> parse_phenotype(std::string_view text) noexcept {
  for (auto p : {Phenotype::TH1, Phenotype::TH2, Phenotype::Other}) {
    if (name(p) == text) return p;
  }
  return std::nullopt;
}

std::string_view name(Stability s) noexcept {
  switch (s) {
    case Stability::Stable:
      return "stable";
    case Stability::Unstable:
      return "unstable";
    case Stability::Indeterminate:
      return "indeterminate";
  }
  return "?";
}

double role_total(const NetworkSpec& spec, const Eigen::VectorXd& x, Species role) {
  double s = 0.0;
  for (auto i : spec.all_of(role)) s += x[static_cast<Eigen::Index>(i)];
  return s;
}

double id_aggregate(const NetworkSpec& spec, const Eigen::VectorXd& x) {
  return role_total(spec, x, Species::Naive) + role_total(spec, x, Species::TH1id) +
         role_total(spec, x, Species::TH2id);
}

Phenotype classify(const NetworkSpec& spec, const Eigen::VectorXd& x, double dominance_ratio) {
  if (!(dominance_ratio >= 1.0)) throw PreconditionError("dominance ratio must be >= 1");
  const double a = role_total(spec, x, Species::CytA);
  const double b = role_total(spec, x, Species::CytB);
  if (a > dominance_ratio * b) return Phenotype::TH1;
  if (b > dominance_ratio * a) return Phenotype::TH2;
  return Phenotype::Other;
}

Eigen::MatrixXd jacobian(const NetworkSpec& spec, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != spec.size() || !is_nonnegative(x)) {
    throw PreconditionError("jacobian needs a non-negative state matching the spec");
  }
  return fd_jacobian(spec, x, nullptr);
}

StabilityResult stability(const NetworkSpec& spec, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != spec.size() || !is_nonnegative(x)) {
    throw PreconditionError("stability needs a non-negative state matching the spec");
  }
  StabilityResult r;
  const auto jac = fd_jacobian(spec, x, &r.nonsmooth);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, /*computeEigenvectors=*/false);
  r.eigenvalues = solver.eigenvalues();
  r.leading_eigen_real = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) {
    r.leading_eigen_real = std::max(r.leading_eigen_real, r.eigenvalues[i].real());
  }
  if (r.nonsmooth || std::abs(r.leading_eigen_real) <= kZeroBand) {
    r.verdict = Stability::Indeterminate;
  } else {
    r.verdict = r.leading_eigen_real < 0.0 ? Stability::Stable : Stability::Unstable;
  }
  return r;
}

ConvergenceError::ConvergenceError(const std::string& message, SteadyStateReport best)
    : Error(message), best_(std::move(best)) {}

CertificateError::CertificateError(const std::string& message, std::vector<SteadyStateReport> found)
    : Error(message), found_(std::move(found)) {}

std::optional<SteadyStateReport> newton_steady_state(const NetworkSpec& spec, const State& guess,
                                                     double tol, const SteadyStateOptions& options) {
  check_guess(spec, guess, tol);
  Eigen::VectorXd x = guess.x;
  Eigen::VectorXd f;
  rhs_into(spec, x, nullptr, f);
  double res = f.lpNorm<Eigen::Infinity>();
  for (std::size_t it = 0; it <= options.max_iterations; ++it) {
    if (res < tol) return make_report(spec, x, guess.t, tol, SolveMethod::Newton, it, options);
    if (it == options.max_iterations) break;
    const Eigen::MatrixXd jac = fd_jacobian(spec, x, nullptr);
    const Eigen::VectorXd dx = jac.completeOrthogonalDecomposition().solve(-f);
    if (!dx.allFinite()) return std::nullopt;
    double lambda = 1.0;
    bool improved = false;
    Eigen::VectorXd trial;
    Eigen::VectorXd ft;
    for (std::size_t h = 0; h <= options.max_halvings; ++h, lambda *= 0.5) {
      trial = (x + lambda * dx).cwiseMax(0.0);
      rhs_into(spec, trial, nullptr, ft);
      const double rt = ft.lpNorm<Eigen::Infinity>();
      if (std::isfinite(rt) && rt < res) {
        x = trial;
        f = ft;
        res = rt;
        improved = true;
        break;
      }
    }
    if (!improved) return std::nullopt;
  }
  return std::nullopt;
}

std::optional<SteadyStateReport> integrate_to_steady_state(const NetworkSpec& spec,
                                                           const State& guess, double tol,
                                                           const SteadyStateOptions& options) {
  check_guess(spec, guess, tol);
  State s = guess;
  const double stop = guess.t + options.fallback_horizon;
  std::size_t chunks = 0;
  while (true) {
    if (residual_of(spec, s.x) < tol) {
      return make_report(spec, s.x, s.t, tol, SolveMethod::Integration, chunks, options);
    }
    if (s.t >= stop) return std::nullopt;
    StepControl ctrl;
    ctrl.dt = options.dt;
    ctrl.t_end = std::min(stop, s.t + kRelaxChunk);
    ctrl.record_every = std::numeric_limits<std::size_t>::max();
    try {
      s = simulate(spec, s, ctrl).back();
    } catch (const DivergenceError&) {
      return std::nullopt;
    }
    ++chunks;
  }
}

namespace {

// Integrates for the full horizon (or until `tol`), returning the end state.
State relax(const NetworkSpec& spec, const State& guess, double tol, const SteadyStateOptions& options) {
  State s = guess;
  const double stop = guess.t + options.fallback_horizon;
  while (s.t < stop && residual_of(spec, s.x) >= tol) {
    StepControl ctrl;
    ctrl.dt = options.dt;
    ctrl.t_end = std::min(stop, s.t + kRelaxChunk);
    ctrl.record_every = std::numeric_limits<std::size_t>::max();
    s = simulate(spec, s, ctrl).back();
  }
  return s;
}

}  // namespace

SteadyStateReport find_steady_state(const NetworkSpec& spec, const State& guess, double tol,
                                    const SteadyStateOptions& options) {
  if (auto r = newton_steady_state(spec, guess, tol, options)) return *r;
  State relaxed = guess;
  try {
    relaxed = relax(spec, guess, tol, options);
  } catch (const DivergenceError& e) {
    throw ConvergenceError(std::string("steady-state search diverged: ") + e.what(),
                           make_report(spec, guess.x, guess.t, tol, SolveMethod::Integration, 0, options));
  }
  if (auto polished = newton_steady_state(spec, relaxed, tol, options)) {
    polished->method = SolveMethod::Integration;
    polished->state.t = relaxed.t;
    return *polished;
  }
  auto best = make_report(spec, relaxed.x, relaxed.t, tol, SolveMethod::Integration, 0, options);
  if (best.converged) return best;
  throw ConvergenceError("no steady state within tolerance (residual " +
                             std::to_string(best.residual) + ")",
                         best);
}

std::vector<State> certificate_guesses(const NetworkSpec& spec) {
  require_valid(spec);
  const auto n = static_cast<Eigen::Index>(spec.size());
  auto set = [&](Eigen::VectorXd& x, Species role, double v) {
    for (auto i : spec.all_of(role)) x[static_cast<Eigen::Index>(i)] = v;
  };
  double naive = 1.0;
  for (auto i : spec.all_of(Species::Naive)) {
    const auto ei = static_cast<Eigen::Index>(i);
    if (spec.source[ei] > 0.0) naive = spec.source[ei] / spec.death[ei];
  }
  std::vector<State> out;
  Eigen::VectorXd base = Eigen::VectorXd::Zero(n);
  set(base, Species::Naive, naive);
  set(base, Species::AntiId, 0.1);
  set(base, Species::TH2id, 0.1);
  set(base, Species::CytB, 0.1);
  out.emplace_back(base, 0.0);

  Eigen::VectorXd th1 = base;
  set(th1, Species::TH1id, 3.0);
  set(th1, Species::CytA, 3.0);
  set(th1, Species::Macrophage, 1.0);
  set(th1, Species::CytC, 1.0);
  set(th1, Species::AntiId, 1.0);
  out.emplace_back(th1, 0.0);

  Eigen::VectorXd th2 = base;
  set(th2, Species::TH2id, 3.0);
  set(th2, Species::CytB, 3.0);
  set(th2, Species::AntiId, 1.0);
  out.emplace_back(th2, 0.0);

  Eigen::VectorXd strong = base;
  set(strong, Species::TH1id, 10.0);
  set(strong, Species::CytA, 10.0);
  set(strong, Species::Macrophage, 3.0);
  set(strong, Species::CytC, 3.0);
  set(strong, Species::AntiId, 3.0);
  out.emplace_back(strong, 0.0);
  for (auto& s : out) {
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (spec.knocked_out[i]) s.x[static_cast<Eigen::Index>(i)] = 0.0;
    }
  }
  return out;
}

BistabilityCertificate bistability_certificate(const NetworkSpec& spec,
                                               const SteadyStateOptions& options) {
  std::optional<SteadyStateReport> th2;
  std::optional<SteadyStateReport> th1;
  std::vector<SteadyStateReport> found;
  for (const auto& guess : certificate_guesses(spec)) {
    State relaxed;
    try {
      relaxed = relax(spec, guess, kCertificateTolerance, options);
    } catch (const DivergenceError&) {
      continue;
    }
    auto r = newton_steady_state(spec, relaxed, kCertificateTolerance, options);
    if (!r) continue;
    r->method = SolveMethod::Integration;
    found.push_back(*r);
    if (!r->stable) continue;
    const double cytokines = std::max(role_total(spec, r->state.x, Species::CytA),
                                      role_total(spec, r->state.x, Species::CytB));
    if (r->label == Phenotype::Other || cytokines < kCertificateCytokineFloor) continue;
    auto& slot = r->label == Phenotype::TH2 ? th2 : th1;
    if (!slot || r->residual < slot->residual) slot = *r;
  }
  if (!th2 || !th1) {
    std::string missing = !th2 && !th1 ? "TH2 and TH1" : (!th2 ? "TH2" : "TH1");
    throw CertificateError("no stable " + missing + " steady state found", std::move(found));
  }
  return {*th2, *th1};
}

bool th2_state_is_lower(const NetworkSpec& spec, const BistabilityCertificate& cert) {
  const auto& a = cert.th2.state.x;
  const auto& b = cert.th1.state.x;
  return id_aggregate(spec, a) < id_aggregate(spec, b) &&
         role_total(spec, a, Species::AntiId) < role_total(spec, b, Species::AntiId);
}

}  // namespace cytonet
