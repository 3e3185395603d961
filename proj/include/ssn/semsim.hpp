#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ssn/annotations.hpp"
#include "ssn/ontology.hpp"

namespace ssn {

enum class Measure {
  Resnik,
  ResnikGraSM,
  Lin,
  LinGraSM,
  JiangConrath,
  JiangConrathGraSM,
  Relevance,
  Kappa,
  Cosine,
  WeightedJaccard,
  CzekanowskiDice,
};

inline constexpr std::array kAllMeasures = {
    Measure::Resnik,    Measure::ResnikGraSM, Measure::Lin,    Measure::LinGraSM,
    Measure::JiangConrath, Measure::JiangConrathGraSM, Measure::Relevance, Measure::Kappa,
    Measure::Cosine,    Measure::WeightedJaccard, Measure::CzekanowskiDice,
};

std::string_view to_string(Measure m);
std::optional<Measure> parse_measure(std::string_view text);

/// Term-pair measures that need a mixer to reach gene level.
bool is_pairwise(Measure m);
bool uses_dca(Measure m);

/// How a |T1| x |T2| term-similarity matrix collapses to one gene score.
enum class Mixer { Max, Avg, BMA };

std::string_view to_string(Mixer m);
std::optional<Mixer> parse_mixer(std::string_view text);

struct SemsimOptions {
  /// Cosine on 0/1 indicator vectors instead of IC-weighted ones.
  bool binary_cosine = false;
  /// CzekanowskiDice over ancestor-closed sets; direct sets when false.
  bool dice_on_closure = true;
  /// Worker threads for build_matrix; 0 picks hardware concurrency.
  unsigned threads = 0;
};

using TermIndex = OntologyGraph::Index;

/// Most informative common ancestor; ties go to the smallest TermId.
TermIndex mica(const OntologyGraph& g, const ICTable& ic, TermIndex a, TermIndex b);
TermId mica(const OntologyGraph& g, const ICTable& ic, const TermId& a, const TermId& b);

/// Common ancestors that are not strict ancestors of another common ancestor.
std::vector<TermIndex> dca(const OntologyGraph& g, const ICTable& ic, TermIndex a, TermIndex b);
std::vector<TermId> dca(const OntologyGraph& g, const ICTable& ic, const TermId& a, const TermId& b);

/// Arithmetic mean of IC over dca(a, b).
double grasm_ic(const OntologyGraph& g, const ICTable& ic, TermIndex a, TermIndex b);

/// Resnik, Lin and JiangConrath (plain or GraSM) plus Relevance on one term pair.
double term_sim(Measure m, const OntologyGraph& g, const ICTable& ic, TermIndex a, TermIndex b);
double term_sim(Measure m, const OntologyGraph& g, const ICTable& ic, const TermId& a, const TermId& b);

/// Unnormalized IC(MICA).
double resnik_raw(const OntologyGraph& g, const ICTable& ic, TermIndex a, TermIndex b);

double relevance_sim(const OntologyGraph& g, const ICTable& ic, const TermId& a, const TermId& b);

/// Per-product view used by the gene-level measures.
struct ProductProfile {
  std::vector<TermIndex> direct;   // IC-bearing direct terms, sorted
  std::vector<TermIndex> closure;  // union of ancestor closures, sorted
};

/// Throws Error(NoAnnotations) when the product has no IC-bearing term.
ProductProfile make_profile(const OntologyGraph& g, const AnnotationCorpus& corpus, const ICTable& ic,
                            const std::string& accession);

double gene_sim_pairwise(Measure m, Mixer mixer, const AnnotationCorpus& corpus, const ICTable& ic,
                         const OntologyGraph& g, const std::string& p1, const std::string& p2);
double gene_sim_setwise(Measure m, const AnnotationCorpus& corpus, const ICTable& ic, const OntologyGraph& g,
                        const std::string& p1, const std::string& p2, const SemsimOptions& options = {});

/// Gene-level similarity on two prepared profiles. `clamped` is set when a
/// negative Kappa was raised to 0.
double gene_sim(Measure m, Mixer mixer, const OntologyGraph& g, const ICTable& ic, const ProductProfile& a,
                const ProductProfile& b, std::size_t kappa_dimension, const SemsimOptions& options = {},
                bool* clamped = nullptr);

/// Number of IC-bearing terms; the vector dimension used by Kappa.
std::size_t kappa_dimension(const ICTable& ic);

/// Symmetric n x n similarity matrix over products, row-major.
struct SimilarityMatrix {
  std::vector<std::string> ids;
  std::vector<double> values;
  std::optional<Measure> measure;
  std::optional<Mixer> mixer;
  std::optional<Namespace> ns;

  std::size_t size() const noexcept { return ids.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * ids.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * ids.size() + j]; }
};

struct MatrixBuild {
  SimilarityMatrix matrix;
  /// Requested products without usable annotations.
  std::vector<std::string> dropped;
  /// Pairs (i < j) whose Kappa was negative and clamped to 0.
  std::vector<std::pair<std::size_t, std::size_t>> clamped;
};

/// All-pairs matrix. Unusable products are dropped and reported; fewer than
/// two usable products throws Error(TooFewProducts). The result does not
/// depend on the thread count.
MatrixBuild build_matrix(const std::vector<std::string>& products, Measure m, Mixer mixer,
                         const AnnotationCorpus& corpus, const ICTable& ic, const OntologyGraph& g,
                         const SemsimOptions& options = {});

/// Every annotated product in the corpus, ordered by accession.
std::vector<std::string> corpus_products(const AnnotationCorpus& corpus);

}  // namespace ssn
