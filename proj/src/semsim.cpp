#include "ssn/semsim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ssn/error.hpp"

namespace ssn {

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::Resnik: return "Resnik";
    case Measure::ResnikGraSM: return "ResnikGraSM";
    case Measure::Lin: return "Lin";
    case Measure::LinGraSM: return "LinGraSM";
    case Measure::JiangConrath: return "JiangConrath";
    case Measure::JiangConrathGraSM: return "JiangConrathGraSM";
    case Measure::Relevance: return "Relevance";
    case Measure::Kappa: return "Kappa";
    case Measure::Cosine: return "Cosine";
    case Measure::WeightedJaccard: return "WeightedJaccard";
    case Measure::CzekanowskiDice: return "CzekanowskiDice";
  }
  return "?";
}

std::optional<Measure> parse_measure(std::string_view text) {
  for (auto m : kAllMeasures) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

bool is_pairwise(Measure m) {
  switch (m) {
    case Measure::Kappa:
    case Measure::Cosine:
    case Measure::WeightedJaccard:
    case Measure::CzekanowskiDice:
      return false;
    default:
      return true;
  }
}

bool uses_dca(Measure m) {
  return m == Measure::ResnikGraSM || m == Measure::LinGraSM || m == Measure::JiangConrathGraSM;
}

std::string_view to_string(Mixer m) {
  switch (m) {
    case Mixer::Max: return "Max";
    case Mixer::Avg: return "Avg";
    case Mixer::BMA: return "BMA";
  }
  return "?";
}

std::optional<Mixer> parse_mixer(std::string_view text) {
  if (text == "Max") return Mixer::Max;
  if (text == "Avg") return Mixer::Avg;
  if (text == "BMA") return Mixer::BMA;
  return std::nullopt;
}

namespace {

std::vector<TermIndex> informative_common(const OntologyGraph& g, const ICTable& ic, TermIndex a, TermIndex b) {
  auto common = g.common_ancestor_indices(a, b);
  std::erase_if(common, [&](TermIndex t) { return !ic.has(t); });
  if (common.empty()) {
    throw Error(ErrorCode::NoInformativeAncestor,
                g.term(a).id.str() + " and " + g.term(b).id.str() + " share no annotated ancestor");
  }
  return common;
}

void require_same_namespace(const OntologyGraph& g, TermIndex a, TermIndex b) {
  if (g.term(a).ns != g.term(b).ns) {
    throw Error(ErrorCode::NamespaceMismatch, g.term(a).id.str() + " and " + g.term(b).id.str());
  }
}

}  // namespace

TermIndex mica(const OntologyGraph& g, const ICTable& ic, TermIndex a, TermIndex b) {
  require_same_namespace(g, a, b);
  auto common = informative_common(g, ic, a, b);
  TermIndex best = common.front();
  double best_ic = ic.at(best);
  for (auto t : common) {
    double v = ic.at(t);
    if (v > best_ic) {
      best = t;
      best_ic = v;
    }
  }
  return best;
}

TermId mica(const OntologyGraph& g, const ICTable& ic, const TermId& a, const TermId& b) {
  return g.term(mica(g, ic, g.index_of(a), g.index_of(b))).id;
}

std::vector<TermIndex> dca(const OntologyGraph& g, const ICTable& ic, TermIndex a, TermIndex b) {
  require_same_namespace(g, a, b);
  auto common = informative_common(g, ic, a, b);
  std::vector<TermIndex> out;
  for (auto c : common) {
    bool dominated = std::any_of(common.begin(), common.end(),
                                 [&](TermIndex d) { return d != c && g.is_ancestor(c, d); });
    if (!dominated) out.push_back(c);
  }
  return out;
}

std::vector<TermId> dca(const OntologyGraph& g, const ICTable& ic, const TermId& a, const TermId& b) {
  std::vector<TermId> out;
  for (auto t : dca(g, ic, g.index_of(a), g.index_of(b))) out.push_back(g.term(t).id);
  return out;
}

double grasm_ic(const OntologyGraph& g, const ICTable& ic, TermIndex a, TermIndex b) {
  auto set = dca(g, ic, a, b);
  double sum = 0.0;
  for (auto t : set) sum += ic.at(t);
  return sum / static_cast<double>(set.size());
}

double resnik_raw(const OntologyGraph& g, const ICTable& ic, TermIndex a, TermIndex b) {
  return ic.at(mica(g, ic, a, b));
}

namespace {

double lin_from(double shared, double ic_a, double ic_b, bool same) {
  if (same) return 1.0;
  double denom = ic_a + ic_b;
  if (denom == 0.0) return 0.0;
  return std::clamp(2.0 * shared / denom, 0.0, 1.0);
}

double jc_from(double shared, double ic_a, double ic_b, bool same) {
  if (same) return 1.0;
  double distance = std::max(0.0, ic_a + ic_b - 2.0 * shared);
  return 1.0 / (1.0 + distance);
}

}  // namespace

double term_sim(Measure m, const OntologyGraph& g, const ICTable& ic, TermIndex a, TermIndex b) {
  // Fixed argument order keeps every measure bit-for-bit symmetric.
  if (b < a) std::swap(a, b);
  const bool same = a == b;
  const double ic_a = ic.at(a);
  const double ic_b = ic.at(b);
  auto shared = [&] { return uses_dca(m) ? grasm_ic(g, ic, a, b) : ic.at(mica(g, ic, a, b)); };

  switch (m) {
    case Measure::Resnik:
    case Measure::ResnikGraSM: {
      double value = shared();
      if (ic.max_ic() == 0.0) return 0.0;
      return std::clamp(value / ic.max_ic(), 0.0, 1.0);
    }
    case Measure::Lin:
    case Measure::LinGraSM:
      return lin_from(shared(), ic_a, ic_b, same);
    case Measure::JiangConrath:
    case Measure::JiangConrathGraSM:
      return jc_from(shared(), ic_a, ic_b, same);
    case Measure::Relevance: {
      double anc = ic.at(mica(g, ic, a, b));
      return lin_from(anc, ic_a, ic_b, same) * (1.0 - std::exp(-anc));
    }
    default:
      throw Error(ErrorCode::InvalidConfig, std::string(to_string(m)) + " is not a term-pair measure");
  }
}

double term_sim(Measure m, const OntologyGraph& g, const ICTable& ic, const TermId& a, const TermId& b) {
  return term_sim(m, g, ic, g.index_of(a), g.index_of(b));
}

double relevance_sim(const OntologyGraph& g, const ICTable& ic, const TermId& a, const TermId& b) {
  return term_sim(Measure::Relevance, g, ic, a, b);
}

ProductProfile make_profile(const OntologyGraph& g, const AnnotationCorpus& corpus, const ICTable& ic,
                            const std::string& accession) {
  const auto* terms = corpus.find(accession);
  ProductProfile profile;
  if (terms) {
    for (auto t : *terms) {
      if (ic.has(t)) profile.direct.push_back(t);
    }
  }
  if (profile.direct.empty()) {
    throw Error(ErrorCode::NoAnnotations, accession + " has no informative annotation in " +
                                              std::string(to_string(corpus.ns)));
  }
  for (auto t : profile.direct) {
    auto anc = g.ancestor_closure(t);
    profile.closure.insert(profile.closure.end(), anc.begin(), anc.end());
  }
  std::sort(profile.closure.begin(), profile.closure.end());
  profile.closure.erase(std::unique(profile.closure.begin(), profile.closure.end()), profile.closure.end());
  return profile;
}

std::size_t kappa_dimension(const ICTable& ic) { return ic.entry_count(); }

namespace {

double mix(Measure m, Mixer mixer, const OntologyGraph& g, const ICTable& ic, const std::vector<TermIndex>& rows,
           const std::vector<TermIndex>& cols) {
  const std::size_t nr = rows.size();
  const std::size_t nc = cols.size();
  std::vector<double> cell(nr * nc);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) cell[i * nc + j] = term_sim(m, g, ic, rows[i], cols[j]);
  }
  switch (mixer) {
    case Mixer::Max:
      return *std::max_element(cell.begin(), cell.end());
    case Mixer::Avg: {
      double sum = 0.0;
      for (double v : cell) sum += v;
      return sum / static_cast<double>(cell.size());
    }
    case Mixer::BMA: {
      double row_sum = 0.0;
      for (std::size_t i = 0; i < nr; ++i) {
        double best = cell[i * nc];
        for (std::size_t j = 1; j < nc; ++j) best = std::max(best, cell[i * nc + j]);
        row_sum += best;
      }
      double col_sum = 0.0;
      for (std::size_t j = 0; j < nc; ++j) {
        double best = cell[j];
        for (std::size_t i = 1; i < nr; ++i) best = std::max(best, cell[i * nc + j]);
        col_sum += best;
      }
      return (row_sum + col_sum) / static_cast<double>(nr + nc);
    }
  }
  return 0.0;
}

struct Overlap {
  std::size_t shared = 0;
  std::size_t only_a = 0;
  std::size_t only_b = 0;
};

Overlap overlap(const std::vector<TermIndex>& a, const std::vector<TermIndex>& b) {
  Overlap o;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++o.shared;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++o.only_a;
      ++i;
    } else {
      ++o.only_b;
      ++j;
    }
  }
  o.only_a += a.size() - i;
  o.only_b += b.size() - j;
  return o;
}

double weighted_jaccard(const ICTable& ic, const std::vector<TermIndex>& a, const std::vector<TermIndex>& b) {
  double inter = 0.0;
  double uni = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      uni += ic.at(a[i++]);
    } else if (i == a.size() || b[j] < a[i]) {
      uni += ic.at(b[j++]);
    } else {
      double v = ic.at(a[i]);
      inter += v;
      uni += v;
      ++i;
      ++j;
    }
  }
  if (uni == 0.0) return a == b ? 1.0 : 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double cosine(const ICTable& ic, const std::vector<TermIndex>& a, const std::vector<TermIndex>& b, bool binary) {
  auto weight = [&](TermIndex t) { return binary ? 1.0 : ic.at(t); };
  double norm_a = 0.0;
  for (auto t : a) norm_a += weight(t) * weight(t);
  double norm_b = 0.0;
  for (auto t : b) norm_b += weight(t) * weight(t);
  if (a == b) return 1.0;
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      dot += weight(a[i]) * weight(a[i]);
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return std::clamp(dot / std::sqrt(norm_a * norm_b), 0.0, 1.0);
}

double czekanowski_dice(const std::vector<TermIndex>& a, const std::vector<TermIndex>& b) {
  auto o = overlap(a, b);
  double sym_diff = static_cast<double>(o.only_a + o.only_b);
  double denom = static_cast<double>(a.size() + b.size());  // |A u B| + |A n B|
  return std::clamp(1.0 - sym_diff / denom, 0.0, 1.0);
}

double kappa(const std::vector<TermIndex>& a, const std::vector<TermIndex>& b, std::size_t dimension,
             bool* clamped) {
  auto o = overlap(a, b);
  const double n = static_cast<double>(dimension);
  const double both = static_cast<double>(o.shared);
  const double only_a = static_cast<double>(o.only_a);
  const double only_b = static_cast<double>(o.only_b);
  const double neither = n - both - only_a - only_b;
  const double observed = (both + neither) / n;
  const double expected = ((both + only_a) * (both + only_b) + (only_b + neither) * (only_a + neither)) / (n * n);
  if (expected >= 1.0) return a == b ? 1.0 : 0.0;
  double k = (observed - expected) / (1.0 - expected);
  if (k < 0.0) {
    if (clamped) *clamped = true;
    return 0.0;
  }
  return std::min(k, 1.0);
}

}  // namespace

double gene_sim(Measure m, Mixer mixer, const OntologyGraph& g, const ICTable& ic, const ProductProfile& a,
                const ProductProfile& b, std::size_t dimension, const SemsimOptions& options, bool* clamped) {
  if (is_pairwise(m)) {
    // Canonical operand order makes Avg summation order symmetric.
    const bool swap = b.direct < a.direct;
    const auto& first = swap ? b : a;
    const auto& second = swap ? a : b;
    return mix(m, mixer, g, ic, first.direct, second.direct);
  }
  switch (m) {
    case Measure::WeightedJaccard:
      return weighted_jaccard(ic, a.closure, b.closure);
    case Measure::Cosine:
      return cosine(ic, a.closure, b.closure, options.binary_cosine);
    case Measure::CzekanowskiDice:
      return options.dice_on_closure ? czekanowski_dice(a.closure, b.closure)
                                     : czekanowski_dice(a.direct, b.direct);
    case Measure::Kappa:
      return kappa(a.closure, b.closure, dimension, clamped);
    default:
      break;
  }
  return 0.0;
}

double gene_sim_pairwise(Measure m, Mixer mixer, const AnnotationCorpus& corpus, const ICTable& ic,
                         const OntologyGraph& g, const std::string& p1, const std::string& p2) {
  if (!is_pairwise(m)) {
    throw Error(ErrorCode::InvalidConfig, std::string(to_string(m)) + " is a set-wise measure");
  }
  auto a = make_profile(g, corpus, ic, p1);
  auto b = make_profile(g, corpus, ic, p2);
  return gene_sim(m, mixer, g, ic, a, b, 0);
}

double gene_sim_setwise(Measure m, const AnnotationCorpus& corpus, const ICTable& ic, const OntologyGraph& g,
                        const std::string& p1, const std::string& p2, const SemsimOptions& options) {
  if (is_pairwise(m)) {
    throw Error(ErrorCode::InvalidConfig, std::string(to_string(m)) + " is a term-pair measure");
  }
  auto a = make_profile(g, corpus, ic, p1);
  auto b = make_profile(g, corpus, ic, p2);
  return gene_sim(m, Mixer::BMA, g, ic, a, b, kappa_dimension(ic), options);
}

std::vector<std::string> corpus_products(const AnnotationCorpus& corpus) {
  std::vector<std::string> out;
  for (const auto& [product, terms] : corpus.direct) {
    if (out.empty() || out.back() != product.accession) out.push_back(product.accession);
  }
  return out;
}

MatrixBuild build_matrix(const std::vector<std::string>& products, Measure m, Mixer mixer,
                         const AnnotationCorpus& corpus, const ICTable& ic, const OntologyGraph& g,
                         const SemsimOptions& options) {
  MatrixBuild build;
  std::vector<ProductProfile> profiles;
  for (const auto& p : products) {
    if (std::find(build.matrix.ids.begin(), build.matrix.ids.end(), p) != build.matrix.ids.end()) continue;
    try {
      profiles.push_back(make_profile(g, corpus, ic, p));
      build.matrix.ids.push_back(p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoAnnotations) throw;
      build.dropped.push_back(p);
    }
  }
  const std::size_t n = profiles.size();
  if (n < 2) {
    throw Error(ErrorCode::TooFewProducts,
                "need at least 2 annotated products in " + std::string(to_string(corpus.ns)) + ", have " +
                    std::to_string(n));
  }
  build.matrix.measure = m;
  build.matrix.mixer = is_pairwise(m) ? std::optional<Mixer>(mixer) : std::nullopt;
  build.matrix.ns = corpus.ns;
  build.matrix.values.assign(n * n, 0.0);
  const std::size_t dimension = kappa_dimension(ic);

  unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> clamped(workers);
  std::vector<std::exception_ptr> failures(workers);

  // Rows are dealt round-robin; every cell is written by exactly one worker.
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i = w; i < n; i += workers) {
        build.matrix.at(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
          bool was_clamped = false;
          double v = gene_sim(m, mixer, g, ic, profiles[i], profiles[j], dimension, options, &was_clamped);
          v = std::clamp(v, 0.0, 1.0);
          build.matrix.at(i, j) = v;
          build.matrix.at(j, i) = v;
          if (was_clamped) clamped[w].emplace_back(i, j);
        }
      }
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  for (auto& c : clamped) build.clamped.insert(build.clamped.end(), c.begin(), c.end());
  std::sort(build.clamped.begin(), build.clamped.end());
  return build;
}

}  // namespace ssn
