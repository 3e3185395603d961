#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ssn/semsim.hpp"

namespace ssn {

enum class NetworkKind { Raw, Pruned };

std::string_view to_string(NetworkKind kind);
std::optional<NetworkKind> parse_network_kind(std::string_view text);

struct WeightedEdge {
  std::size_t a;  // a < b, indices into nodes
  std::size_t b;
  double weight;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Undirected edge-weighted graph. Raw networks carry weights in (0, 1];
/// pruned ones carry only 0.5 or 1 and have no isolated nodes.
class WeightedNetwork {
 public:
  using Adjacency = std::vector<std::vector<std::pair<std::size_t, double>>>;

  WeightedNetwork() = default;
  /// Validates the invariants of `kind`; throws Error(MalformedNetwork).
  WeightedNetwork(std::vector<std::string> nodes, std::vector<WeightedEdge> edges, NetworkKind kind);

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<WeightedEdge>& edges() const noexcept { return edges_; }
  NetworkKind kind() const noexcept { return kind_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  /// Neighbours in ascending index order.
  Adjacency adjacency() const;
  std::vector<std::size_t> degrees() const;
  std::optional<std::size_t> find(std::string_view node) const;

  friend bool operator==(const WeightedNetwork&, const WeightedNetwork&) = default;

 private:
  std::vector<std::string> nodes_;
  std::vector<WeightedEdge> edges_;
  NetworkKind kind_ = NetworkKind::Raw;
};

/// One edge per off-diagonal entry greater than zero.
WeightedNetwork build_ssn(const SimilarityMatrix& m);

/// Component label per node, numbered by first appearance.
std::vector<std::size_t> connected_components(const WeightedNetwork& g);
std::size_t component_count(const WeightedNetwork& g);

}  // namespace ssn
