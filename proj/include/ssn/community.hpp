#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ssn/network.hpp"
#include "ssn/semsim.hpp"

namespace ssn {

/// Community label per network node, aligned with `nodes`. Labels are dense
/// from 0 in order of first appearance.
struct Partition {
  std::vector<std::string> nodes;
  std::vector<std::size_t> labels;
  double modularity = 0.0;

  std::size_t community_count() const;
};

/// Pluggable community detector.
class CommunityDetector {
 public:
  virtual ~CommunityDetector() = default;
  virtual Partition detect(const WeightedNetwork& g, std::uint64_t seed) const = 0;
};

/// Agglomerative greedy modularity maximisation. Starts from singletons and
/// merges the pair with the largest positive gain until none is left. The
/// seed permutes the initial labels; ties go to the smallest label pair.
class GreedyModularity final : public CommunityDetector {
 public:
  Partition detect(const WeightedNetwork& g, std::uint64_t seed) const override;
};

/// GreedyModularity; throws Error(EmptyGraph) on a graph without nodes.
Partition detect_communities(const WeightedNetwork& g, std::uint64_t seed = 0);

/// Weighted Newman modularity. Throws Error(LabelMismatch) when the
/// partition does not label exactly the network's nodes.
double modularity(const WeightedNetwork& g, const Partition& p);

struct CoherenceReport {
  /// Mean intra-community similarity, for communities with at least one pair.
  std::map<std::size_t, double> per_community;
  std::map<std::size_t, std::size_t> pair_counts;
  std::map<std::size_t, std::size_t> sizes;
  /// Pair-count weighted mean over all communities; 0 when undefined.
  double overall_weighted_mean = 0.0;
  /// False when every community is a singleton.
  bool defined = false;
  double modularity = 0.0;
};

/// Throws Error(IdMismatch) when a partition node is missing from the matrix.
CoherenceReport coherence(const Partition& p, const SimilarityMatrix& m);

}  // namespace ssn
