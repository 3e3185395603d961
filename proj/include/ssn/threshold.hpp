#pragma once

#include <cstddef>
#include <vector>

#include "ssn/network.hpp"
#include "ssn/spectral.hpp"

namespace ssn {

/// Schedule for the global multiplier alpha in k = mean + alpha * sd.
struct ThresholdConfig {
  double alpha_start = 0.0;
  double alpha_step = 0.25;
  double alpha_max = 3.0;
  double fiedler_tolerance = 0.05;
  LaplacianKind laplacian_kind = LaplacianKind::SymmetricNormalized;
  /// Eigenvalues kept per iteration report.
  std::size_t spectrum_size = 3;
};

/// Throws Error(InvalidConfig) naming the offending field.
void validate(const ThresholdConfig& cfg);

/// Mean plus alpha times the population standard deviation of the node's
/// incident edge weights. Throws Error(DegreeTooLow) below degree 2.
double local_threshold(const WeightedNetwork& g, std::size_t node, double alpha);

/// One pruning pass over a raw network. An edge survives with weight 1 when
/// it beats the local threshold at both endpoints, 0.5 at exactly one.
/// Degree-1 endpoints never vote. Isolated nodes are removed afterwards, so
/// an empty network (no nodes) is a valid result.
WeightedNetwork prune_once(const WeightedNetwork& g, double alpha);

struct PruneResult {
  WeightedNetwork pruned;
  std::vector<SpectralReport> iterations;
  double final_alpha = 0.0;
  bool converged = false;
};

/// Re-prunes the raw network at increasing alpha until the candidate is
/// nearly disconnected, the candidate empties, or alpha passes alpha_max.
/// Throws Error(TooSmall) for fewer than 3 nodes.
PruneResult prune(const WeightedNetwork& g, const ThresholdConfig& cfg = {}, const SpectralOptions& options = {});

}  // namespace ssn
