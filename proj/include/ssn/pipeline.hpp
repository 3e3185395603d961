#pragma once

#include <cstdint>
#include <string>

#include "ssn/community.hpp"
#include "ssn/io.hpp"
#include "ssn/network.hpp"
#include "ssn/semsim.hpp"
#include "ssn/threshold.hpp"

namespace ssn {

/// Measure used when none is requested.
inline constexpr Measure kDefaultMeasure = Measure::Lin;
inline constexpr Mixer kDefaultMixer = Mixer::BMA;

struct NetworkSummary {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t communities = 0;
  double modularity = 0.0;
  double coherence = 0.0;
  bool coherence_defined = false;
};

/// Communities and coherence on the raw network and on its pruned version.
struct Comparison {
  WeightedNetwork raw;
  PruneResult prune;
  Partition raw_partition;
  Partition pruned_partition;
  CoherenceReport raw_coherence;
  CoherenceReport pruned_coherence;
  NetworkSummary raw_summary;
  NetworkSummary pruned_summary;
};

/// Partition and coherence for one network; an empty network yields an
/// empty partition.
std::pair<Partition, CoherenceReport> analyse_communities(const WeightedNetwork& g, const SimilarityMatrix& m,
                                                          std::uint64_t seed);

Comparison compare(const SimilarityMatrix& m, const ThresholdConfig& cfg = {}, std::uint64_t seed = 0);

/// network,nodes,edges,communities,modularity,coherence with rows raw, pruned.
std::string comparison_csv(const Comparison& c);
Json comparison_to_json(const Comparison& c);

/// Per-iteration spectra of a prune run: {converged, final_alpha, fiedler_tolerance, iterations}.
Json spectra_to_json(const PruneResult& r, const ThresholdConfig& cfg);
/// {partition, coherence} for one network.
Json communities_to_json(const Partition& p, const CoherenceReport& r);

}  // namespace ssn
