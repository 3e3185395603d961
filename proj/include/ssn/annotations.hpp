#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ssn/ontology.hpp"

namespace ssn {

struct GeneProductId {
  std::string accession;
  std::string organism;

  friend auto operator<=>(const GeneProductId&, const GeneProductId&) = default;
  friend bool operator==(const GeneProductId&, const GeneProductId&) = default;
};

/// Annotations of one namespace, bound to the OntologyGraph that parsed them
/// (term indices refer to that graph).
struct AnnotationCorpus {
  Namespace ns = Namespace::BP;
  /// Direct annotations, sorted term indices per product.
  std::map<GeneProductId, std::vector<OntologyGraph::Index>> direct;
  /// Distinct products annotated to each term or a descendant; indexed by
  /// term index. Empty until propagate() runs.
  std::vector<std::uint32_t> propagated_counts;
  /// Products with at least one annotation in this namespace.
  std::size_t total = 0;

  bool propagated() const noexcept { return !propagated_counts.empty(); }
  const std::vector<OntologyGraph::Index>* find(const std::string& accession) const;
};

struct GafDiagnostics {
  std::size_t skipped_unknown_term = 0;
  std::size_t skipped_not_qualifier = 0;
  std::size_t malformed = 0;
  std::size_t skipped_evidence = 0;
  std::size_t used = 0;
};

struct GafOptions {
  /// When non-empty, only rows whose evidence code (column 7) is listed are used.
  std::set<std::string> evidence_allowlist;
};

struct GafResult {
  std::array<AnnotationCorpus, 3> corpora;  // indexed by Namespace
  GafDiagnostics diagnostics;

  const AnnotationCorpus& corpus(Namespace ns) const { return corpora[static_cast<std::size_t>(ns)]; }
  AnnotationCorpus& corpus(Namespace ns) { return corpora[static_cast<std::size_t>(ns)]; }
};

/// Reads GAF 2.x rows (tab separated, '!' comments). Uses columns 2
/// (accession), 4 (qualifier), 5 (term), 7 (evidence), 9 (aspect) and 13
/// (taxon, as the organism label). Returned corpora are not yet propagated.
/// Throws Error(MalformedLine) for rows with fewer than 9 columns and
/// Error(EmptyCorpus) when no row is usable.
GafResult parse_gaf(std::istream& in, const OntologyGraph& g, const GafOptions& options = {});
GafResult parse_gaf_file(const std::filesystem::path& path, const OntologyGraph& g,
                         const GafOptions& options = {});

/// True-path propagation with distinct-product counting.
AnnotationCorpus propagate(AnnotationCorpus corpus, const OntologyGraph& g);

/// parse_gaf followed by propagate on each namespace.
GafResult load_annotations(std::istream& in, const OntologyGraph& g, const GafOptions& options = {});

/// Natural-log information content, -ln(count / total).
class ICTable {
 public:
  ICTable() = default;
  ICTable(std::vector<std::optional<double>> ic, double max_ic) : ic_(std::move(ic)), max_ic_(max_ic) {}

  bool has(OntologyGraph::Index t) const { return t < ic_.size() && ic_[t].has_value(); }
  /// Throws Error(UnknownIC) when the term was never annotated.
  double at(OntologyGraph::Index t) const;
  double max_ic() const noexcept { return max_ic_; }
  std::size_t entry_count() const;
  const std::vector<std::optional<double>>& values() const noexcept { return ic_; }

 private:
  std::vector<std::optional<double>> ic_;
  double max_ic_ = 0.0;
};

/// Throws Error(EmptyCorpus) when total is 0 or the corpus is not propagated.
ICTable compute_ic(const AnnotationCorpus& corpus);

}  // namespace ssn
