#pragma once

// Independent reference implementations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "cytonet/dynamics.hpp"
#include "cytonet/interventions.hpp"
#include "cytonet/loops.hpp"
#include "cytonet/network_spec.hpp"

namespace oracle {

using namespace cytonet;

/// Rate law written out term by term from the model equations, with dense
/// loops and no shared code with the library.
inline Eigen::VectorXd rate(const NetworkSpec& s, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& inflow, const Eigen::VectorXd& extra) {
  const auto n = x.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    double prod = 0.0;
    if (!s.knocked_out[ui]) {
      if (s.species[ui].kind == SpeciesKind::SelfMultiplicativeCell) {
        double own = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) own += s.w(i, j) * x[i] * x[j];
        double diff = 0.0;
        if (s.origin[ui]) {
          const auto o = static_cast<Eigen::Index>(*s.origin[ui]);
          for (Eigen::Index j = 0; j < n; ++j) diff += s.w1(i, j) * x[o] * x[j];
        }
        prod = own + std::max(diff, 0.0);
        if (s.clamp == ClampMode::TotalProliferation) prod = std::max(prod, 0.0);
      } else if (s.species[ui].kind == SpeciesKind::NonSelfMultiplicative) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) sum += (s.w(i, j) + s.w2(i, j)) * x[j];
        prod = std::max(sum, 0.0);
      }
    }
    out[i] = prod - (s.death[i] + extra[i]) * x[i] + s.source[i] + inflow[i];
  }
  return out;
}

inline Eigen::VectorXd rate(const NetworkSpec& s, const Eigen::VectorXd& x) {
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(x.size());
  return rate(s, x, z, z);
}

/// Forward Euler with projection onto x >= 0. Boluses apply at the first
/// step whose time reaches the event; windows use the step's left end.
/// Records the state at every multiple of `sample` (exact grid multiples).
/// Sparse in the weights, so dt = 1e-6 over hundreds of time units is
/// affordable.
class Euler {
 public:
  explicit Euler(const NetworkSpec& s) : spec_(s) {
    const auto n = static_cast<Eigen::Index>(s.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (s.w(i, j) != 0.0) w_.push_back({i, j, s.w(i, j)});
        if (s.w1(i, j) != 0.0) w1_.push_back({i, j, s.w1(i, j)});
        if (s.w2(i, j) != 0.0) w2_.push_back({i, j, s.w2(i, j)});
      }
    }
  }

  /// Returns samples at t0 + k * sample_every_steps * dt.
  std::vector<Eigen::VectorXd> run(Eigen::VectorXd x, double t0, double dt, std::size_t steps,
                                   std::size_t sample_every_steps,
                                   const std::vector<Event>& events = {}) const {
    const auto n = x.size();
    std::vector<Eigen::VectorXd> samples{x};
    std::vector<bool> done(events.size(), false);
    Eigen::VectorXd own(n), diff(n), lin(n), k(n), inflow(n), extra(n);
    for (std::size_t step = 0; step < steps; ++step) {
      const double t = t0 + static_cast<double>(step) * dt;
      inflow.setZero();
      extra.setZero();
      for (std::size_t e = 0; e < events.size(); ++e) {
        const auto& ev = events[e];
        const auto sp = static_cast<Eigen::Index>(ev.species);
        if (ev.kind == EventKind::Bolus && !done[e] && t >= ev.time - 0.5 * dt) {
          x[sp] += ev.magnitude;
          done[e] = true;
        } else if (ev.kind == EventKind::Infusion && t >= ev.time - 0.5 * dt && t < ev.end() - 0.5 * dt) {
          inflow[sp] += ev.magnitude;
        } else if (ev.kind == EventKind::Blockade && t >= ev.time - 0.5 * dt && t < ev.end() - 0.5 * dt) {
          extra[sp] += ev.magnitude;
        }
      }
      own.setZero();
      diff.setZero();
      lin.setZero();
      for (const auto& e : w_) {
        own[e.i] += e.v * x[e.j];
        lin[e.i] += e.v * x[e.j];
      }
      for (const auto& e : w1_) diff[e.i] += e.v * x[e.j];
      for (const auto& e : w2_) lin[e.i] += e.v * x[e.j];
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        double prod = 0.0;
        switch (spec_.species[ui].kind) {
          case SpeciesKind::SelfMultiplicativeCell: {
            double d = 0.0;
            if (spec_.origin[ui]) d = std::max(x[static_cast<Eigen::Index>(*spec_.origin[ui])] * diff[i], 0.0);
            prod = x[i] * own[i] + d;
            if (spec_.clamp == ClampMode::TotalProliferation) prod = std::max(prod, 0.0);
            break;
          }
          case SpeciesKind::NonSelfMultiplicative:
            prod = std::max(lin[i], 0.0);
            break;
          case SpeciesKind::Decaying:
            break;
        }
        if (spec_.knocked_out[ui]) prod = 0.0;
        k[i] = prod - (spec_.death[i] + extra[i]) * x[i] + spec_.source[i] + inflow[i];
      }
      x = (x + dt * k).cwiseMax(0.0);
      if ((step + 1) % sample_every_steps == 0) samples.push_back(x);
    }
    return samples;
  }

 private:
  struct Entry {
    Eigen::Index i, j;
    double v;
  };
  const NetworkSpec& spec_;
  std::vector<Entry> w_, w1_, w2_;
};

/// Every simple cycle by exhaustive enumeration of node sequences that start
/// at their smallest node. Parallel edges contribute every sign they carry.
inline std::vector<Cycle> brute_force_cycles(const SignedGraph& g, std::size_t max_len) {
  const std::size_t n = g.size();
  std::map<std::pair<std::size_t, std::size_t>, std::set<int>> signs;
  for (const auto& e : g.edges) signs[{e.from, e.to}].insert(e.sign);
  std::set<Cycle> found;
  std::vector<std::size_t> seq;
  // Recursive enumeration of all injective sequences.
  auto close = [&](const std::vector<std::size_t>& nodes) {
    std::set<int> acc{1};
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto it = signs.find({nodes[k], nodes[(k + 1) % nodes.size()]});
      if (it == signs.end()) return;
      std::set<int> next;
      for (int a : acc) {
        for (int b : it->second) next.insert(a * b);
      }
      acc = next;
    }
    for (int s : acc) found.insert(Cycle{nodes, s});
  };
  std::vector<bool> used(n, false);
  auto extend = [&](auto&& self) -> void {
    close(seq);
    if (seq.size() == max_len) return;
    for (std::size_t v = seq.front() + 1; v < n; ++v) {
      if (used[v]) continue;
      used[v] = true;
      seq.push_back(v);
      self(self);
      seq.pop_back();
      used[v] = false;
    }
  };
  for (std::size_t s = 0; s < n; ++s) {
    seq = {s};
    used.assign(n, false);
    used[s] = true;
    extend(extend);
  }
  return {found.begin(), found.end()};
}

/// A spec drawn from the licensed topology: every weight log-uniform in
/// [0.3, 3] with its licensed sign, tied groups equal, the optional edge
/// present half the time, and deaths respecting the lifespan ordering.
inline NetworkSpec random_valid_spec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto mag = [&] { return 0.3 * std::pow(10.0, u(rng)); };
  NetworkSpec s = canonical_network();
  for (const auto& e : sign_table()) {
    if (e.optional && u(rng) < 0.5) continue;
    s.weight(e.channel, e.target, e.source) = e.sign * mag();
  }
  for (const auto& group : tied_weight_groups()) {
    const double v = std::abs(s.weight(group.front().channel, group.front().target, group.front().source));
    for (const auto& r : group) {
      double& ref = s.weight(r.channel, r.target, r.source);
      ref = (ref < 0.0 ? -1.0 : 1.0) * v;
    }
  }
  for (auto sp : kAllSpecies) s.death[static_cast<Eigen::Index>(index(sp))] = 0.5 + 1.5 * u(rng);
  s.death[static_cast<Eigen::Index>(index(Species::AntiId))] = 0.05 + 0.4 * u(rng);
  s.source[static_cast<Eigen::Index>(index(Species::Naive))] = u(rng);
  return s;
}

/// Up to four random events within [0, horizon).
inline std::vector<Event> random_schedule(std::mt19937_64& rng, const NetworkSpec& spec, double horizon) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Event> evs;
  const std::size_t count = static_cast<std::size_t>(u(rng) * 5.0);
  for (std::size_t k = 0; k < count; ++k) {
    Event e;
    const double r = u(rng);
    e.time = std::floor(u(rng) * horizon * 100.0) / 100.0;
    e.species = static_cast<std::size_t>(u(rng) * static_cast<double>(spec.size()));
    e.magnitude = 0.01 * std::pow(10.0, 3.0 * u(rng));
    if (r < 0.4) {
      e.kind = EventKind::Bolus;
    } else if (r < 0.7) {
      e.kind = EventKind::Infusion;
      e.duration = 0.1 + u(rng) * horizon;
    } else if (r < 0.9) {
      e.kind = EventKind::Blockade;
      e.duration = 0.1 + u(rng) * horizon;
    } else {
      e.kind = EventKind::Knockout;
      e.species = index(Species::CytA) + static_cast<std::size_t>(u(rng) * 3.0);
    }
    evs.push_back(e);
  }
  std::stable_sort(evs.begin(), evs.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
  return evs;
}

}  // namespace oracle
