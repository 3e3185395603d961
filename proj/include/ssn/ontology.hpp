#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ssn {

/// The three GO taxonomies.
enum class Namespace : std::uint8_t { MF, BP, CC };

inline constexpr Namespace kAllNamespaces[] = {Namespace::MF, Namespace::BP, Namespace::CC};

std::string_view to_string(Namespace ns);
/// OBO namespace name, e.g. "biological_process".
std::string_view obo_name(Namespace ns);
/// Accepts "MF"/"BP"/"CC", the OBO names, and GAF aspect letters F/P/C.
std::optional<Namespace> parse_namespace(std::string_view text);

enum class Relation : std::uint8_t { IsA, PartOf };

/// Identifier of the form PREFIX:digits, e.g. GO:0008150.
class TermId {
 public:
  /// Throws std::invalid_argument when `value` does not match PREFIX:digits.
  explicit TermId(std::string value);

  static bool is_valid(std::string_view value);

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const TermId&, const TermId&) = default;
  friend bool operator==(const TermId&, const TermId&) = default;

 private:
  std::string value_;
};

struct Term {
  TermId id;
  std::string name;
  Namespace ns;
  bool obsolete = false;

  friend bool operator==(const Term&, const Term&) = default;
};

struct OntologyEdge {
  TermId child;
  TermId parent;
  Relation relation;

  friend auto operator<=>(const OntologyEdge&, const OntologyEdge&) = default;
  friend bool operator==(const OntologyEdge&, const OntologyEdge&) = default;
};

struct OboOptions {
  /// part_of edges participate in ancestor closure when set.
  bool follow_part_of = true;
};

/// Immutable GO-style DAG. Terms are indexed densely in ascending TermId
/// order, so comparing indices is the same as comparing ids.
class OntologyGraph {
 public:
  using Index = std::uint32_t;

  OntologyGraph(std::vector<Term> terms, std::vector<OntologyEdge> edges, OboOptions options = {});

  std::size_t size() const noexcept { return terms_.size(); }
  const Term& term(Index i) const { return terms_.at(i); }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  const std::vector<OntologyEdge>& edges() const noexcept { return edges_; }
  const OboOptions& options() const noexcept { return options_; }

  std::optional<Index> find(const TermId& id) const;
  std::optional<Index> find(std::string_view id) const;
  /// Throws Error(UnknownTerm).
  Index index_of(const TermId& id) const;

  /// Parents along traversed relations (is_a, plus part_of if enabled).
  std::span<const Index> parents(Index i) const { return parents_.at(i); }
  std::span<const Index> children(Index i) const { return children_.at(i); }

  /// Reflexive-transitive closure, sorted ascending.
  std::span<const Index> ancestor_closure(Index i) const { return closure_.at(i); }
  bool is_ancestor(Index ancestor, Index term) const;

  std::vector<TermId> ancestors(const TermId& t) const;
  /// Throws Error(NamespaceMismatch) for terms of different namespaces.
  std::vector<TermId> common_ancestors(const TermId& a, const TermId& b) const;
  std::vector<Index> common_ancestor_indices(Index a, Index b) const;

  const std::vector<TermId>& roots(Namespace ns) const {
    return roots_[static_cast<std::size_t>(ns)];
  }

  friend bool operator==(const OntologyGraph& a, const OntologyGraph& b) {
    return a.terms_ == b.terms_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<Term> terms_;
  std::vector<OntologyEdge> edges_;
  OboOptions options_;
  std::unordered_map<std::string, Index> index_;
  std::vector<std::vector<Index>> parents_;
  std::vector<std::vector<Index>> children_;
  std::vector<std::vector<Index>> closure_;
  std::vector<TermId> roots_[3];
};

/// Parses the OBO subset: [Term] stanzas with id, name, namespace, is_a,
/// relationship: part_of and is_obsolete. Other stanzas and keys are skipped.
OntologyGraph parse_obo(std::istream& in, const OboOptions& options = {});
OntologyGraph parse_obo_file(const std::filesystem::path& path, const OboOptions& options = {});

/// Canonical stanza form; parse_obo(write_obo(g)) == g.
void write_obo(std::ostream& out, const OntologyGraph& g);

}  // namespace ssn
