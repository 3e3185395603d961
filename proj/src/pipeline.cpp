#include "ssn/pipeline.hpp"

#include <tuple>

namespace ssn {

namespace {

NetworkSummary summarise(const WeightedNetwork& g, const Partition& p, const CoherenceReport& c) {
  return NetworkSummary{g.node_count(), g.edge_count(), p.community_count(), p.modularity,
                        c.overall_weighted_mean, c.defined};
}

Json summary_to_json(const NetworkSummary& s) {
  return Json{{"nodes", s.nodes},
              {"edges", s.edges},
              {"communities", s.communities},
              {"modularity", s.modularity},
              {"coherence", s.coherence},
              {"coherence_defined", s.coherence_defined}};
}

}  // namespace

std::pair<Partition, CoherenceReport> analyse_communities(const WeightedNetwork& g, const SimilarityMatrix& m,
                                                          std::uint64_t seed) {
  if (g.empty()) return {Partition{}, CoherenceReport{}};
  auto partition = detect_communities(g, seed);
  auto report = coherence(partition, m);
  return {std::move(partition), std::move(report)};
}

Comparison compare(const SimilarityMatrix& m, const ThresholdConfig& cfg, std::uint64_t seed) {
  Comparison c;
  c.raw = build_ssn(m);
  c.prune = prune(c.raw, cfg);
  std::tie(c.raw_partition, c.raw_coherence) = analyse_communities(c.raw, m, seed);
  std::tie(c.pruned_partition, c.pruned_coherence) = analyse_communities(c.prune.pruned, m, seed);
  c.raw_summary = summarise(c.raw, c.raw_partition, c.raw_coherence);
  c.pruned_summary = summarise(c.prune.pruned, c.pruned_partition, c.pruned_coherence);
  return c;
}

std::string comparison_csv(const Comparison& c) {
  std::string out = "network,nodes,edges,communities,modularity,coherence\n";
  auto row = [&](const char* name, const NetworkSummary& s) {
    out += name;
    out += ',' + std::to_string(s.nodes) + ',' + std::to_string(s.edges) + ',' + std::to_string(s.communities);
    out += ',' + format_value(s.modularity) + ',' + format_value(s.coherence) + '\n';
  };
  row("raw", c.raw_summary);
  row("pruned", c.pruned_summary);
  return out;
}

Json comparison_to_json(const Comparison& c) {
  return Json{{"raw", summary_to_json(c.raw_summary)},
              {"pruned", summary_to_json(c.pruned_summary)},
              {"converged", c.prune.converged},
              {"final_alpha", c.prune.final_alpha}};
}

Json spectra_to_json(const PruneResult& r, const ThresholdConfig& cfg) {
  Json j = prune_result_to_json(r);
  j.erase("pruned");
  j["fiedler_tolerance"] = cfg.fiedler_tolerance;
  return j;
}

Json communities_to_json(const Partition& p, const CoherenceReport& r) {
  return Json{{"partition", partition_to_json(p)}, {"coherence", coherence_to_json(r)}};
}

}  // namespace ssn
