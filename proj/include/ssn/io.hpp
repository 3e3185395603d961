#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "ssn/annotations.hpp"
#include "ssn/community.hpp"
#include "ssn/network.hpp"
#include "ssn/semsim.hpp"
#include "ssn/threshold.hpp"

namespace ssn {

using Json = nlohmann::json;

/// printf("%.10g"), the number format of every text artifact.
std::string format_value(double v);

// Similarity matrix: CSV with an empty corner cell, a header row and a
// leading column of product ids.
std::string matrix_to_csv(const SimilarityMatrix& m);
/// Throws Error(MalformedMatrix) for empty, ragged, asymmetric or out-of-range input.
SimilarityMatrix matrix_from_csv(std::istream& in);
Json matrix_to_json(const SimilarityMatrix& m);
SimilarityMatrix matrix_from_json(const Json& j);

// Networks: TSV edge list (node_a, node_b, weight) or JSON {nodes, edges, kind}.
std::string network_to_tsv(const WeightedNetwork& g);
/// Kind is inferred as pruned when every weight is 0.5 or 1 and `kind` is unset.
WeightedNetwork network_from_tsv(std::istream& in, std::optional<NetworkKind> kind = std::nullopt);
Json network_to_json(const WeightedNetwork& g);
WeightedNetwork network_from_json(const Json& j);

Json spectral_report_to_json(const SpectralReport& r);
Json prune_result_to_json(const PruneResult& r);
Json threshold_config_to_json(const ThresholdConfig& cfg);
/// Missing keys keep their defaults; throws Error(InvalidConfig) on bad types.
ThresholdConfig threshold_config_from_json(const Json& j);

Json partition_to_json(const Partition& p);
Json coherence_to_json(const CoherenceReport& r);
/// community,size,coherence rows; singletons report an empty coherence cell.
std::string communities_summary_csv(const CoherenceReport& r);

Json gaf_diagnostics_to_json(const GafDiagnostics& d);

/// Two-space indented JSON followed by a newline.
std::string dump(const Json& j);

}  // namespace ssn
