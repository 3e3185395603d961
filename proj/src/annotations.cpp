#include "ssn/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <string_view>

#include "ssn/error.hpp"

namespace ssn {

const std::vector<OntologyGraph::Index>* AnnotationCorpus::find(const std::string& accession) const {
  auto it = direct.lower_bound(GeneProductId{accession, {}});
  if (it == direct.end() || it->first.accession != accession) return nullptr;
  return &it->second;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

}  // namespace

GafResult parse_gaf(std::istream& in, const OntologyGraph& g, const GafOptions& options) {
  GafResult result;
  for (auto ns : kAllNamespaces) result.corpus(ns).ns = ns;
  auto& diag = result.diagnostics;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '!') continue;

    auto cols = split_tabs(line);
    if (cols.size() < 9) {
      throw Error(ErrorCode::MalformedLine,
                  "expected at least 9 tab-separated columns, found " + std::to_string(cols.size()), line_no);
    }
    std::string_view accession = cols[1];
    std::string_view qualifier = cols[3];
    std::string_view term = cols[4];
    std::string_view evidence = cols[6];
    std::string_view aspect = cols[8];

    if (qualifier.find("NOT") != std::string_view::npos) {
      ++diag.skipped_not_qualifier;
      continue;
    }
    auto ns = aspect.size() == 1 ? parse_namespace(aspect) : std::nullopt;
    if (accession.empty() || !ns) {
      ++diag.malformed;
      continue;
    }
    if (!options.evidence_allowlist.empty() && !options.evidence_allowlist.contains(std::string(evidence))) {
      ++diag.skipped_evidence;
      continue;
    }
    auto idx = g.find(term);
    // Obsolete terms sit outside the DAG and cannot be propagated.
    if (!idx || g.term(*idx).obsolete) {
      ++diag.skipped_unknown_term;
      continue;
    }
    if (g.term(*idx).ns != *ns) {
      ++diag.malformed;
      continue;
    }
    std::string organism = cols.size() > 12 ? std::string(cols[12]) : std::string();
    auto& terms = result.corpus(*ns).direct[GeneProductId{std::string(accession), std::move(organism)}];
    terms.push_back(*idx);
    ++diag.used;
  }

  if (diag.used == 0) throw Error(ErrorCode::EmptyCorpus, "no usable annotation rows");

  for (auto& corpus : result.corpora) {
    for (auto& [product, terms] : corpus.direct) {
      std::sort(terms.begin(), terms.end());
      terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    }
    corpus.total = corpus.direct.size();
  }
  return result;
}

GafResult parse_gaf_file(const std::filesystem::path& path, const OntologyGraph& g, const GafOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedLine, "cannot open " + path.string());
  return parse_gaf(in, g, options);
}

AnnotationCorpus propagate(AnnotationCorpus corpus, const OntologyGraph& g) {
  corpus.propagated_counts.assign(g.size(), 0);
  std::vector<OntologyGraph::Index> closure;
  for (const auto& [product, terms] : corpus.direct) {
    closure.clear();
    for (auto t : terms) {
      auto anc = g.ancestor_closure(t);
      closure.insert(closure.end(), anc.begin(), anc.end());
    }
    std::sort(closure.begin(), closure.end());
    closure.erase(std::unique(closure.begin(), closure.end()), closure.end());
    for (auto t : closure) ++corpus.propagated_counts[t];
  }
  corpus.total = corpus.direct.size();
  return corpus;
}

GafResult load_annotations(std::istream& in, const OntologyGraph& g, const GafOptions& options) {
  GafResult result = parse_gaf(in, g, options);
  for (auto& corpus : result.corpora) corpus = propagate(std::move(corpus), g);
  return result;
}

double ICTable::at(OntologyGraph::Index t) const {
  if (!has(t)) throw Error(ErrorCode::UnknownIC, "term index " + std::to_string(t) + " has no information content");
  return *ic_[t];
}

std::size_t ICTable::entry_count() const {
  return static_cast<std::size_t>(std::count_if(ic_.begin(), ic_.end(), [](const auto& v) { return v.has_value(); }));
}

ICTable compute_ic(const AnnotationCorpus& corpus) {
  if (corpus.total == 0 || !corpus.propagated()) {
    throw Error(ErrorCode::EmptyCorpus, std::string("no annotated products in ") + std::string(to_string(corpus.ns)));
  }
  const double total = static_cast<double>(corpus.total);
  std::vector<std::optional<double>> ic(corpus.propagated_counts.size());
  double max_ic = 0.0;
  for (std::size_t t = 0; t < ic.size(); ++t) {
    auto count = corpus.propagated_counts[t];
    if (count == 0) continue;
    double p = count / total;
    double value = p >= 1.0 ? 0.0 : -std::log(p);
    ic[t] = value;
    max_ic = std::max(max_ic, value);
  }
  return ICTable(std::move(ic), max_ic);
}

}  // namespace ssn
