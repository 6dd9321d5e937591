#pragma once

// Trust chains over the directed graph induced by every entity's Direct
// Trust Table: enumeration of simple paths trustor -> ... -> trustee and
// evaluation of the recommended trust they carry.

#include "cloudtrust/trust_core.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cloudtrust {

// One direct-interaction relationship `from -> to` for a service.
struct GraphEdge {
  std::uint64_t n_positive = 0;
  std::uint64_t n_total = 0;
  double sl = 0.0;
  TrustDegree direct_trust;

  double weight() const { return edge_weight(n_positive, n_total, sl); }

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

class TrustGraph {
public:
  // Outgoing edges of one node for one service, keyed by the head node.
  using Adjacency = std::map<EntityId, GraphEdge>;

  void add_node(const EntityId& id);

  // Adds or replaces an edge. Both endpoints become nodes.
  void add_edge(const EntityId& from, const EntityId& to, const ServiceId& service,
                const GraphEdge& edge);

  bool has_node(const EntityId& id) const { return nodes_.contains(id); }
  const std::set<EntityId>& nodes() const noexcept { return nodes_; }

  const GraphEdge* find_edge(const EntityId& from, const EntityId& to,
                             const ServiceId& service) const;
  const Adjacency* out_edges(const EntityId& from, const ServiceId& service) const;
  std::size_t edge_count() const noexcept;

  // Calls `fn(from, to, service, edge)` for every edge in (from, service, to)
  // order.
  template <class Fn>
  void for_each_edge(Fn&& fn) const {
    for (const auto& [key, adjacency] : edges_)
      for (const auto& [to, edge] : adjacency) fn(key.first, to, key.second, edge);
  }

  friend bool operator==(const TrustGraph&, const TrustGraph&) = default;

private:
  std::set<EntityId> nodes_;
  std::map<std::pair<EntityId, ServiceId>, Adjacency> edges_;
};

/// Every simple path source -> target of 2..max_len edges over `service`
/// edges, heaviest total weight first, ties broken by node sequence.
std::vector<TrustChain> discover_chains(const TrustGraph& graph, const EntityId& source,
                                        const EntityId& target, const ServiceId& service,
                                        std::size_t max_len = kDefaultMaxChainLength);

struct Recommendation {
  TrustDegree trust;
  std::size_t chain_count = 0;
};

/// Recommended trust of `target` as seen by `source`, combined over all
/// discovered chains that carry weight. nullopt when no such chain exists.
/// The graph's direct trust values are taken as of the snapshot time.
std::optional<Recommendation> evaluate_recommendation(const TrustGraph& graph,
                                                      const EntityId& source,
                                                      const EntityId& target,
                                                      const ServiceId& service,
                                                      std::size_t max_len = kDefaultMaxChainLength);

/// Graph fixture document: `nodes` and `edges` ({from, to, service, n_p, n,
/// sl, dt}).
TrustGraph parse_graph(std::string_view document);
std::string graph_to_json(const TrustGraph& graph);

}  // namespace cloudtrust
