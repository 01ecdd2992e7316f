#include "cytonet/loops.hpp"

#include <algorithm>
#include <set>

#include "cytonet/error.hpp"
#include "cytonet/species.hpp"

namespace cytonet {

namespace {

struct Search {
  const SignedGraph& g;
  std::size_t max_len;
  std::vector<std::vector<const SignedEdge*>> out_edges;
  std::set<Cycle> found;
  std::vector<std::size_t> path;
  std::vector<bool> on_path;

  Search(const SignedGraph& graph, std::size_t len) : g(graph), max_len(len), out_edges(graph.size()), on_path(graph.size(), false) {
    for (const auto& e : g.edges) {
      if (e.from >= g.size() || e.to >= g.size()) throw PreconditionError("edge references an unknown node");
      out_edges[e.from].push_back(&e);
    }
  }

  // Cycles whose smallest node is `start`; `sign` is the product so far.
  void dfs(std::size_t start, std::size_t node, int sign) {
    for (const auto* e : out_edges[node]) {
      const int s = sign * e->sign;
      if (e->to == start) {
        found.insert(Cycle{path, s});
        continue;
      }
      if (e->to < start || on_path[e->to] || path.size() >= max_len) continue;
      path.push_back(e->to);
      on_path[e->to] = true;
      dfs(start, e->to, s);
      on_path[e->to] = false;
      path.pop_back();
    }
  }
};

bool subset_of(const Cycle& c, const std::vector<std::size_t>& allowed) {
  return std::all_of(c.nodes.begin(), c.nodes.end(), [&](std::size_t n) {
    return std::find(allowed.begin(), allowed.end(), n) != allowed.end();
  });
}

bool same_nodes(const Cycle& c, std::vector<std::size_t> want) {
  auto have = c.nodes;
  std::sort(have.begin(), have.end());
  std::sort(want.begin(), want.end());
  return have == want;
}

}  // namespace

bool Cycle::contains(std::size_t node) const noexcept {
  return std::find(nodes.begin(), nodes.end(), node) != nodes.end();
}

std::vector<Cycle> enumerate_cycles(const SignedGraph& g, std::size_t max_len) {
  if (max_len == 0) throw PreconditionError("maximum cycle length must be >= 1");
  Search s(g, max_len);
  for (std::size_t start = 0; start < g.size(); ++start) {
    s.path = {start};
    s.on_path[start] = true;
    s.dfs(start, start, 1);
    s.on_path[start] = false;
  }
  return {s.found.begin(), s.found.end()};
}

std::vector<LoopCheck> verify_feedback_loops(const SignedGraph& g, std::size_t max_len) {
  const auto cycles = enumerate_cycles(g, max_len);
  auto node = [&](Species s) { return g.find(name(s)); };
  const auto naive = node(Species::Naive);
  const auto th1 = node(Species::TH1id);
  const auto th2 = node(Species::TH2id);
  const auto anti = node(Species::AntiId);
  const auto mac = node(Species::Macrophage);
  const auto cyt_a = node(Species::CytA);
  const auto cyt_b = node(Species::CytB);
  const auto cyt_c = node(Species::CytC);

  auto has = [](const Cycle& c, const std::optional<std::size_t>& n) { return n && c.contains(*n); };

  std::vector<LoopCheck> checks;
  auto check = [&](std::string label, int sign, auto pred) {
    LoopCheck lc{std::move(label), sign, false, {}};
    for (const auto& c : cycles) {
      if (c.sign == sign && pred(c)) {
        lc.found = true;
        lc.witness = c;
        break;
      }
    }
    checks.push_back(std::move(lc));
  };

  check("id/anti-id negative feedback", -1, [&](const Cycle& c) {
    return has(c, anti) && (has(c, naive) || has(c, th1) || has(c, th2));
  });
  check("TH1id-CytA positive feedback", +1, [&](const Cycle& c) {
    return th1 && cyt_a && same_nodes(c, {*th1, *cyt_a});
  });
  check("TH2id-CytB positive feedback", +1, [&](const Cycle& c) {
    return th2 && cyt_b && same_nodes(c, {*th2, *cyt_b});
  });
  check("TH1id-CytA-Macrophage-CytC positive feedback", +1, [&](const Cycle& c) {
    return th1 && cyt_a && mac && cyt_c && same_nodes(c, {*th1, *cyt_a, *mac, *cyt_c});
  });
  check("AntiId-TH2 arm negative feedback", -1, [&](const Cycle& c) {
    if (!anti || !th2 || !cyt_b) return false;
    return has(c, anti) && (has(c, th2) || has(c, cyt_b)) && subset_of(c, {*th2, *cyt_b, *anti});
  });
  return checks;
}

std::string format_cycle(const SignedGraph& g, const Cycle& c) {
  std::string out;
  for (auto n : c.nodes) {
    if (n >= g.size()) throw PreconditionError("cycle references an unknown node");
    out += g.nodes[n] + " -> ";
  }
  if (!c.nodes.empty()) out += g.nodes[c.nodes.front()];
  out += c.sign > 0 ? " (+)" : " (-)";
  return out;
}

}  // namespace cytonet
