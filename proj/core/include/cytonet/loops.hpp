#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cytonet/network_spec.hpp"

namespace cytonet {

/// A simple directed cycle. `nodes` starts at its smallest node index and
/// does not repeat the first node at the end.
struct Cycle {
  std::vector<std::size_t> nodes;
  int sign = 1;

  std::size_t length() const noexcept { return nodes.size(); }
  bool contains(std::size_t node) const noexcept;

  friend bool operator==(const Cycle&, const Cycle&) = default;
  friend auto operator<=>(const Cycle& a, const Cycle& b) {
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() <=> b.nodes.size();
    if (a.nodes != b.nodes) return a.nodes <=> b.nodes;
    return a.sign <=> b.sign;
  }
};

inline constexpr std::size_t kDefaultMaxCycleLength = 6;

/// All simple cycles of length <= max_len, sorted by (length, nodes, sign).
/// Parallel edges of opposite sign yield one cycle per sign combination.
std::vector<Cycle> enumerate_cycles(const SignedGraph& g, std::size_t max_len = kDefaultMaxCycleLength);

struct LoopCheck {
  std::string name;
  int expected_sign = 0;
  bool found = false;
  /// The witnessing cycle when found.
  Cycle witness;
};

/// The five feedback structures of the id/anti-id network:
///   1. negative loop through AntiId and an id cell,
///   2. positive TH1id <-> CytA loop,
///   3. positive TH2id <-> CytB loop,
///   4. positive TH1id -> CytA -> Macrophage -> CytC loop,
///   5. negative loop between AntiId and the TH2 arm (TH2id or CytB),
///      restricted to the nodes {TH2id, CytB, AntiId}.
/// Nodes are looked up by canonical species name.
std::vector<LoopCheck> verify_feedback_loops(const SignedGraph& g,
                                          std::size_t max_len = kDefaultMaxCycleLength);

std::string format_cycle(const SignedGraph& g, const Cycle& c);

}  // namespace cytonet
