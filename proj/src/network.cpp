#include "ssn/network.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "ssn/error.hpp"

namespace ssn {

std::string_view to_string(NetworkKind kind) { return kind == NetworkKind::Raw ? "raw" : "pruned"; }

std::optional<NetworkKind> parse_network_kind(std::string_view text) {
  if (text == "raw") return NetworkKind::Raw;
  if (text == "pruned") return NetworkKind::Pruned;
  return std::nullopt;
}

WeightedNetwork::WeightedNetwork(std::vector<std::string> nodes, std::vector<WeightedEdge> edges, NetworkKind kind)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), kind_(kind) {
  {
    std::set<std::string_view> seen;
    for (const auto& n : nodes_) {
      if (!seen.insert(n).second) throw Error(ErrorCode::MalformedNetwork, "duplicate node " + n);
    }
  }
  for (auto& e : edges_) {
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.b >= nodes_.size()) throw Error(ErrorCode::MalformedNetwork, "edge endpoint out of range");
    if (e.a == e.b) throw Error(ErrorCode::MalformedNetwork, "self-loop on " + nodes_[e.a]);
    if (kind_ == NetworkKind::Raw && !(e.weight > 0.0 && e.weight <= 1.0)) {
      throw Error(ErrorCode::MalformedNetwork, "raw weight outside (0,1] on " + nodes_[e.a] + "-" + nodes_[e.b]);
    }
    if (kind_ == NetworkKind::Pruned && e.weight != 0.5 && e.weight != 1.0) {
      throw Error(ErrorCode::MalformedNetwork, "pruned weight must be 0.5 or 1");
    }
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const WeightedEdge& x, const WeightedEdge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].a == edges_[i - 1].a && edges_[i].b == edges_[i - 1].b) {
      throw Error(ErrorCode::MalformedNetwork,
                  "duplicate edge " + nodes_[edges_[i].a] + "-" + nodes_[edges_[i].b]);
    }
  }
  if (kind_ == NetworkKind::Pruned) {
    auto deg = degrees();
    for (std::size_t i = 0; i < deg.size(); ++i) {
      if (deg[i] == 0) throw Error(ErrorCode::MalformedNetwork, "isolated node " + nodes_[i] + " in pruned network");
    }
  }
}

WeightedNetwork::Adjacency WeightedNetwork::adjacency() const {
  Adjacency adj(nodes_.size());
  for (const auto& e : edges_) {
    adj[e.a].emplace_back(e.b, e.weight);
    adj[e.b].emplace_back(e.a, e.weight);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

std::vector<std::size_t> WeightedNetwork::degrees() const {
  std::vector<std::size_t> deg(nodes_.size(), 0);
  for (const auto& e : edges_) {
    ++deg[e.a];
    ++deg[e.b];
  }
  return deg;
}

std::optional<std::size_t> WeightedNetwork::find(std::string_view node) const {
  auto it = std::find(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

WeightedNetwork build_ssn(const SimilarityMatrix& m) {
  std::vector<WeightedEdge> edges;
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double w = m.at(i, j);
      if (w > 0.0) edges.push_back({i, j, std::min(w, 1.0)});
    }
  }
  return WeightedNetwork(m.ids, std::move(edges), NetworkKind::Raw);
}

std::vector<std::size_t> connected_components(const WeightedNetwork& g) {
  // Union-find keyed by node index; labels assigned in node order.
  std::vector<std::size_t> parent(g.node_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges()) {
    auto ra = root(e.a);
    auto rb = root(e.b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<std::size_t> label(g.node_count());
  std::vector<std::size_t> mapping(g.node_count(), static_cast<std::size_t>(-1));
  std::size_t next = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    auto r = root(i);
    if (mapping[r] == static_cast<std::size_t>(-1)) mapping[r] = next++;
    label[i] = mapping[r];
  }
  return label;
}

std::size_t component_count(const WeightedNetwork& g) {
  auto labels = connected_components(g);
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

}  // namespace ssn
