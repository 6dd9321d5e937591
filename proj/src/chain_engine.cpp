#include "cloudtrust/chain_engine.hpp"

#include "cloudtrust/error.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <numeric>

namespace cloudtrust {

using detail::json;
using detail::require;
using detail::require_array;

void TrustGraph::add_node(const EntityId& id) {
  if (id.empty())
    throw_invalid("graph node id must not be empty");
  nodes_.insert(id);
}

void TrustGraph::add_edge(const EntityId& from, const EntityId& to, const ServiceId& service,
                          const GraphEdge& edge) {
  if (from == to)
    throw_invalid("graph edge is a self-loop on '" + from + "'");
  if (service.empty())
    throw_invalid("graph edge service must not be empty");
  if (edge.n_total == 0)
    throw_invalid("graph edge " + from + "->" + to + " has no interactions");
  // Validates n_positive <= n_total and sl in [0, 1].
  (void)edge.weight();
  add_node(from);
  add_node(to);
  edges_[{from, service}].insert_or_assign(to, edge);
}

const GraphEdge* TrustGraph::find_edge(const EntityId& from, const EntityId& to,
                                       const ServiceId& service) const {
  const Adjacency* adjacency = out_edges(from, service);
  if (adjacency == nullptr) return nullptr;
  auto it = adjacency->find(to);
  return it == adjacency->end() ? nullptr : &it->second;
}

const TrustGraph::Adjacency* TrustGraph::out_edges(const EntityId& from,
                                                   const ServiceId& service) const {
  auto it = edges_.find({from, service});
  return it == edges_.end() ? nullptr : &it->second;
}

std::size_t TrustGraph::edge_count() const noexcept {
  return std::accumulate(edges_.begin(), edges_.end(), std::size_t{0},
                         [](std::size_t n, const auto& kv) { return n + kv.second.size(); });
}

namespace {

struct PathSearch {
  const TrustGraph& graph;
  const EntityId& target;
  const ServiceId& service;
  std::size_t max_len;

  std::vector<EntityId> path;
  std::set<EntityId> on_path;
  std::vector<std::vector<EntityId>> found;

  void extend(const EntityId& node) {
    const TrustGraph::Adjacency* adjacency = graph.out_edges(node, service);
    if (adjacency == nullptr) return;
    const std::size_t depth = path.size();  // edges after taking the next hop
    for (const auto& [next, edge] : *adjacency) {
      if (on_path.contains(next)) continue;
      if (next == target) {
        if (depth >= 2) {
          found.push_back(path);
          found.back().push_back(next);
        }
        continue;
      }
      // A detour through `next` needs at least one more edge to reach target.
      if (depth + 1 > max_len) continue;
      path.push_back(next);
      on_path.insert(next);
      extend(next);
      on_path.erase(next);
      path.pop_back();
    }
  }
};

TrustChain build_chain(const TrustGraph& graph, const std::vector<EntityId>& nodes,
                       const ServiceId& service, std::size_t max_len) {
  std::vector<ChainEdge> edges;
  edges.reserve(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const GraphEdge* e = graph.find_edge(nodes[i], nodes[i + 1], service);
    edges.push_back(ChainEdge{nodes[i], nodes[i + 1], e->weight(), e->direct_trust});
  }
  return TrustChain(std::move(edges), max_len);
}

}  // namespace

std::vector<TrustChain> discover_chains(const TrustGraph& graph, const EntityId& source,
                                        const EntityId& target, const ServiceId& service,
                                        std::size_t max_len) {
  if (source == target)
    throw_invalid("trust chain source and target are both '" + source + "'");
  if (max_len < 2 || max_len > kMaxChainLength)
    throw_invalid("maximum chain length must lie in [2, 8], got " + std::to_string(max_len));

  PathSearch search{graph, target, service, max_len, {source}, {source}, {}};
  search.extend(source);

  struct Ranked {
    std::vector<EntityId> nodes;
    TrustChain chain;
    double total;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(search.found.size());
  for (auto& nodes : search.found) {
    TrustChain chain = build_chain(graph, nodes, service, max_len);
    const double total = chain.total_weight();
    ranked.push_back(Ranked{std::move(nodes), std::move(chain), total});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.nodes < b.nodes;
  });

  std::vector<TrustChain> out;
  out.reserve(ranked.size());
  for (auto& r : ranked) out.push_back(std::move(r.chain));
  return out;
}

std::optional<Recommendation> evaluate_recommendation(const TrustGraph& graph,
                                                      const EntityId& source,
                                                      const EntityId& target,
                                                      const ServiceId& service,
                                                      std::size_t max_len) {
  std::vector<ChainValue> values;
  for (const TrustChain& chain : discover_chains(graph, source, target, service, max_len)) {
    const double total = chain.total_weight();
    // Zero-weight chains carry no information and are dropped.
    if (!(total > 0.0)) continue;
    values.push_back(ChainValue{chain_trust(chain), total});
  }
  if (values.empty()) return std::nullopt;
  return Recommendation{aggregate_recommendations(values), values.size()};
}

TrustGraph parse_graph(std::string_view document) {
  const json doc = detail::parse_document(document);
  return detail::with_schema_errors([&] {
    TrustGraph graph;
    for (const json& node : require_array(doc, "nodes")) graph.add_node(node.get<std::string>());
    for (const json& e : require_array(doc, "edges")) {
      const auto n_p = require(e, "n_p").get<std::uint64_t>();
      const auto n = require(e, "n").get<std::uint64_t>();
      graph.add_edge(require(e, "from").get<std::string>(), require(e, "to").get<std::string>(),
                     require(e, "service").get<std::string>(),
                     GraphEdge{n_p, n, require(e, "sl").get<double>(),
                               TrustDegree(require(e, "dt").get<double>())});
    }
    return graph;
  });
}

std::string graph_to_json(const TrustGraph& graph) {
  json nodes = json::array();
  for (const auto& id : graph.nodes()) nodes.push_back(id);
  json edges = json::array();
  graph.for_each_edge([&](const EntityId& from, const EntityId& to, const ServiceId& service,
                          const GraphEdge& edge) {
    edges.push_back({{"from", from},
                     {"to", to},
                     {"service", service},
                     {"n_p", edge.n_positive},
                     {"n", edge.n_total},
                     {"sl", edge.sl},
                     {"dt", edge.direct_trust.value()}});
  });
  json doc = {{"nodes", nodes}, {"edges", edges}};
  return doc.dump(2) + "\n";
}

}  // namespace cloudtrust
