#include "ssn/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "ssn/error.hpp"

namespace ssn {

std::string_view to_string(Namespace ns) {
  switch (ns) {
    case Namespace::MF: return "MF";
    case Namespace::BP: return "BP";
    case Namespace::CC: return "CC";
  }
  return "?";
}

std::string_view obo_name(Namespace ns) {
  switch (ns) {
    case Namespace::MF: return "molecular_function";
    case Namespace::BP: return "biological_process";
    case Namespace::CC: return "cellular_component";
  }
  return "?";
}

std::optional<Namespace> parse_namespace(std::string_view text) {
  if (text == "MF" || text == "F" || text == "molecular_function") return Namespace::MF;
  if (text == "BP" || text == "P" || text == "biological_process") return Namespace::BP;
  if (text == "CC" || text == "C" || text == "cellular_component") return Namespace::CC;
  return std::nullopt;
}

bool TermId::is_valid(std::string_view value) {
  auto colon = value.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == value.size()) return false;
  for (std::size_t i = 0; i < colon; ++i) {
    char c = value[i];
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  for (std::size_t i = colon + 1; i < value.size(); ++i) {
    if (value[i] < '0' || value[i] > '9') return false;
  }
  return true;
}

TermId::TermId(std::string value) : value_(std::move(value)) {
  if (!is_valid(value_)) throw std::invalid_argument("invalid term id '" + value_ + "'");
}

OntologyGraph::OntologyGraph(std::vector<Term> terms, std::vector<OntologyEdge> edges, OboOptions options)
    : terms_(std::move(terms)), edges_(std::move(edges)), options_(options) {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    auto [it, inserted] = index_.emplace(terms_[i].id.str(), static_cast<Index>(i));
    if (!inserted) throw Error(ErrorCode::MalformedStanza, "duplicate term " + terms_[i].id.str());
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  const std::size_t n = terms_.size();
  parents_.assign(n, {});
  children_.assign(n, {});
  std::vector<std::vector<Index>> all_parents(n);
  for (const auto& e : edges_) {
    auto child = find(e.child);
    auto parent = find(e.parent);
    if (!child) throw Error(ErrorCode::DanglingReference, "undeclared term " + e.child.str());
    if (!parent) throw Error(ErrorCode::DanglingReference, "undeclared term " + e.parent.str());
    if (terms_[*child].ns != terms_[*parent].ns) {
      throw Error(ErrorCode::MalformedStanza,
                  "edge " + e.child.str() + " -> " + e.parent.str() + " crosses namespaces");
    }
    all_parents[*child].push_back(*parent);
    if (e.relation == Relation::IsA || options_.follow_part_of) {
      parents_[*child].push_back(*parent);
      children_[*parent].push_back(*child);
    }
  }
  for (auto& p : parents_) p.erase(std::unique(p.begin(), p.end()), p.end());
  for (auto& c : children_) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }

  // Acyclicity over every stored edge, traversed or not. Iterative DFS with
  // colours; the first back edge names a cycle member.
  {
    std::vector<std::uint8_t> colour(n, 0);
    std::vector<std::pair<Index, std::size_t>> stack;
    for (Index start = 0; start < n; ++start) {
      if (colour[start] != 0) continue;
      stack.emplace_back(start, 0);
      colour[start] = 1;
      while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < all_parents[node].size()) {
          Index p = all_parents[node][next++];
          if (colour[p] == 1) throw Error(ErrorCode::CycleDetected, "cycle through " + terms_[p].id.str());
          if (colour[p] == 0) {
            colour[p] = 1;
            stack.emplace_back(p, 0);
          }
        } else {
          colour[node] = 2;
          stack.pop_back();
        }
      }
    }
  }

  // Closure in topological order (parents before children).
  std::vector<std::size_t> pending(n);
  std::vector<Index> order;
  order.reserve(n);
  for (Index i = 0; i < n; ++i) {
    pending[i] = parents_[i].size();
    if (pending[i] == 0) order.push_back(i);
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (Index c : children_[order[head]]) {
      if (--pending[c] == 0) order.push_back(c);
    }
  }
  closure_.assign(n, {});
  for (Index t : order) {
    auto& out = closure_[t];
    out.push_back(t);
    for (Index p : parents_[t]) out.insert(out.end(), closure_[p].begin(), closure_[p].end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }

  for (Index i = 0; i < n; ++i) {
    if (!terms_[i].obsolete && parents_[i].empty()) {
      roots_[static_cast<std::size_t>(terms_[i].ns)].push_back(terms_[i].id);
    }
  }
}

std::optional<OntologyGraph::Index> OntologyGraph::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<OntologyGraph::Index> OntologyGraph::find(const TermId& id) const { return find(id.str()); }

OntologyGraph::Index OntologyGraph::index_of(const TermId& id) const {
  auto i = find(id);
  if (!i) throw Error(ErrorCode::UnknownTerm, id.str());
  return *i;
}

bool OntologyGraph::is_ancestor(Index ancestor, Index term) const {
  const auto& c = closure_.at(term);
  return std::binary_search(c.begin(), c.end(), ancestor);
}

std::vector<TermId> OntologyGraph::ancestors(const TermId& t) const {
  std::vector<TermId> out;
  for (Index i : closure_[index_of(t)]) out.push_back(terms_[i].id);
  return out;
}

std::vector<OntologyGraph::Index> OntologyGraph::common_ancestor_indices(Index a, Index b) const {
  const auto& ca = closure_.at(a);
  const auto& cb = closure_.at(b);
  std::vector<Index> out;
  std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(out));
  return out;
}

std::vector<TermId> OntologyGraph::common_ancestors(const TermId& a, const TermId& b) const {
  Index ia = index_of(a);
  Index ib = index_of(b);
  if (terms_[ia].ns != terms_[ib].ns) {
    throw Error(ErrorCode::NamespaceMismatch, a.str() + " and " + b.str());
  }
  std::vector<TermId> out;
  for (Index i : common_ancestor_indices(ia, ib)) out.push_back(terms_[i].id);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Drops a trailing "! comment" and "{qualifiers}" block.
std::string_view strip_comment(std::string_view s) {
  auto bang = s.find('!');
  if (bang != std::string_view::npos) s = s.substr(0, bang);
  auto brace = s.find('{');
  if (brace != std::string_view::npos) s = s.substr(0, brace);
  return trim(s);
}

struct PendingTerm {
  std::size_t line = 0;
  std::optional<std::string> id;
  std::string name;
  std::optional<Namespace> ns;
  bool obsolete = false;
  std::vector<std::pair<std::string, Relation>> parents;
  std::vector<std::size_t> parent_lines;
};

}  // namespace

OntologyGraph parse_obo(std::istream& in, const OboOptions& options) {
  std::vector<PendingTerm> pending;
  bool in_term = false;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      in_term = line == "[Term]";
      if (in_term) {
        pending.emplace_back();
        pending.back().line = line_no;
      }
      continue;
    }
    if (!in_term) continue;

    auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::MalformedStanza, "expected 'key: value'", line_no);
    }
    std::string_view key = trim(line.substr(0, colon));
    std::string_view value = trim(line.substr(colon + 1));
    PendingTerm& t = pending.back();

    if (key == "id") {
      auto id = strip_comment(value);
      if (t.id) throw Error(ErrorCode::MalformedStanza, "duplicate id tag", line_no);
      if (!TermId::is_valid(id)) {
        throw Error(ErrorCode::MalformedStanza, "invalid term id '" + std::string(id) + "'", line_no);
      }
      t.id = std::string(id);
    } else if (key == "name") {
      t.name = std::string(value);
    } else if (key == "namespace") {
      auto ns = parse_namespace(strip_comment(value));
      if (!ns) throw Error(ErrorCode::MalformedStanza, "unknown namespace '" + std::string(value) + "'", line_no);
      t.ns = ns;
    } else if (key == "is_a") {
      auto target = strip_comment(value);
      if (!TermId::is_valid(target)) {
        throw Error(ErrorCode::MalformedStanza, "invalid is_a target '" + std::string(target) + "'", line_no);
      }
      t.parents.emplace_back(std::string(target), Relation::IsA);
      t.parent_lines.push_back(line_no);
    } else if (key == "relationship") {
      auto rel = strip_comment(value);
      auto space = rel.find_first_of(" \t");
      if (space == std::string_view::npos) {
        throw Error(ErrorCode::MalformedStanza, "relationship needs a type and a target", line_no);
      }
      auto type = rel.substr(0, space);
      auto target = trim(rel.substr(space + 1));
      if (type != "part_of") continue;  // other relation types are not traversed
      if (!TermId::is_valid(target)) {
        throw Error(ErrorCode::MalformedStanza, "invalid part_of target '" + std::string(target) + "'", line_no);
      }
      t.parents.emplace_back(std::string(target), Relation::PartOf);
      t.parent_lines.push_back(line_no);
    } else if (key == "is_obsolete") {
      t.obsolete = strip_comment(value) == "true";
    }
  }

  if (pending.empty()) throw Error(ErrorCode::MalformedStanza, "no [Term] stanzas", line_no);

  std::unordered_map<std::string, Namespace> declared;
  for (const auto& t : pending) {
    if (!t.id) throw Error(ErrorCode::MalformedStanza, "stanza without id", t.line);
    if (!t.ns) throw Error(ErrorCode::MalformedStanza, "stanza without namespace", t.line);
    if (!declared.emplace(*t.id, *t.ns).second) {
      throw Error(ErrorCode::MalformedStanza, "duplicate term " + *t.id, t.line);
    }
  }

  std::vector<Term> terms;
  std::vector<OntologyEdge> edges;
  terms.reserve(pending.size());
  for (auto& t : pending) {
    for (std::size_t k = 0; k < t.parents.size(); ++k) {
      const auto& [target, relation] = t.parents[k];
      auto it = declared.find(target);
      if (it == declared.end()) {
        throw Error(ErrorCode::DanglingReference, *t.id + " refers to undeclared " + target, t.parent_lines[k]);
      }
      if (it->second != *t.ns) {
        throw Error(ErrorCode::MalformedStanza, *t.id + " -> " + target + " crosses namespaces",
                    t.parent_lines[k]);
      }
      edges.push_back({TermId(*t.id), TermId(target), relation});
    }
    terms.push_back({TermId(*t.id), std::move(t.name), *t.ns, t.obsolete});
  }
  return OntologyGraph(std::move(terms), std::move(edges), options);
}

OntologyGraph parse_obo_file(const std::filesystem::path& path, const OboOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedStanza, "cannot open " + path.string());
  return parse_obo(in, options);
}

void write_obo(std::ostream& out, const OntologyGraph& g) {
  out << "format-version: 1.2\n";
  // edges_ is sorted by (child, parent, relation), so each term's edges are contiguous.
  auto edge = g.edges().begin();
  for (const auto& t : g.terms()) {
    out << "\n[Term]\n";
    out << "id: " << t.id.str() << '\n';
    if (!t.name.empty()) out << "name: " << t.name << '\n';
    out << "namespace: " << obo_name(t.ns) << '\n';
    while (edge != g.edges().end() && edge->child < t.id) ++edge;
    for (auto e = edge; e != g.edges().end() && e->child == t.id; ++e) {
      if (e->relation == Relation::IsA) out << "is_a: " << e->parent.str() << '\n';
    }
    for (auto e = edge; e != g.edges().end() && e->child == t.id; ++e) {
      if (e->relation == Relation::PartOf) out << "relationship: part_of " << e->parent.str() << '\n';
    }
    if (t.obsolete) out << "is_obsolete: true\n";
  }
}

}  // namespace ssn
