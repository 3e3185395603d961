#include "ssn/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <unordered_map>

#include "ssn/error.hpp"

namespace ssn {

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void chomp(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

double parse_double(const std::string& text, ErrorCode code, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(code, "not a number: '" + text + "'", line);
  }
  if (used != text.size() || !std::isfinite(v)) throw Error(code, "not a number: '" + text + "'", line);
  return v;
}

}  // namespace

namespace {

void check_symmetric(const SimilarityMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (m.at(i, j) != m.at(j, i)) {
        throw Error(ErrorCode::MalformedMatrix, "asymmetric entry " + m.ids[i] + "," + m.ids[j]);
      }
    }
  }
}

}  // namespace

std::string matrix_to_csv(const SimilarityMatrix& m) {
  std::string out;
  for (const auto& id : m.ids) {
    out += ',';
    out += id;
  }
  out += '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.ids[i];
    for (std::size_t j = 0; j < m.size(); ++j) {
      out += ',';
      out += format_value(m.at(i, j));
    }
    out += '\n';
  }
  return out;
}

SimilarityMatrix matrix_from_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  SimilarityMatrix m;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (m.ids.empty()) {
      if (cells.size() < 2 || !cells.front().empty()) {
        throw Error(ErrorCode::MalformedMatrix, "header must be ',id1,id2,...'", line_no);
      }
      m.ids.assign(cells.begin() + 1, cells.end());
      continue;
    }
    const std::size_t row = m.values.size() / m.ids.size();
    if (row >= m.ids.size()) throw Error(ErrorCode::MalformedMatrix, "more rows than ids", line_no);
    if (cells.size() != m.ids.size() + 1) throw Error(ErrorCode::MalformedMatrix, "ragged row", line_no);
    if (cells.front() != m.ids[row]) {
      throw Error(ErrorCode::MalformedMatrix, "row id '" + cells.front() + "' does not match header", line_no);
    }
    for (std::size_t j = 1; j < cells.size(); ++j) {
      double v = parse_double(cells[j], ErrorCode::MalformedMatrix, line_no);
      if (v < 0.0 || v > 1.0) throw Error(ErrorCode::MalformedMatrix, "value outside [0,1]", line_no);
      m.values.push_back(v);
    }
  }
  if (m.ids.empty()) throw Error(ErrorCode::MalformedMatrix, "empty matrix");
  if (m.values.size() != m.ids.size() * m.ids.size()) {
    throw Error(ErrorCode::MalformedMatrix, "expected " + std::to_string(m.ids.size()) + " rows");
  }
  check_symmetric(m);
  return m;
}

Json matrix_to_json(const SimilarityMatrix& m) {
  Json values = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m.at(i, j));
    values.push_back(std::move(row));
  }
  Json j;
  j["ids"] = m.ids;
  j["measure"] = m.measure ? Json(std::string(to_string(*m.measure))) : Json(nullptr);
  j["mixer"] = m.mixer ? Json(std::string(to_string(*m.mixer))) : Json(nullptr);
  j["namespace"] = m.ns ? Json(std::string(to_string(*m.ns))) : Json(nullptr);
  j["values"] = std::move(values);
  return j;
}

SimilarityMatrix matrix_from_json(const Json& j) {
  SimilarityMatrix m;
  try {
    m.ids = j.at("ids").get<std::vector<std::string>>();
    if (j.contains("measure") && !j["measure"].is_null()) m.measure = parse_measure(j["measure"].get<std::string>());
    if (j.contains("mixer") && !j["mixer"].is_null()) m.mixer = parse_mixer(j["mixer"].get<std::string>());
    if (j.contains("namespace") && !j["namespace"].is_null()) {
      m.ns = parse_namespace(j["namespace"].get<std::string>());
    }
    const auto& rows = j.at("values");
    if (rows.size() != m.ids.size()) throw Error(ErrorCode::MalformedMatrix, "row count does not match ids");
    for (const auto& row : rows) {
      if (row.size() != m.ids.size()) throw Error(ErrorCode::MalformedMatrix, "ragged row");
      for (const auto& v : row) {
        double x = v.get<double>();
        if (x < 0.0 || x > 1.0) throw Error(ErrorCode::MalformedMatrix, "value outside [0,1]");
        m.values.push_back(x);
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedMatrix, e.what());
  }
  if (m.ids.empty()) throw Error(ErrorCode::MalformedMatrix, "empty matrix");
  check_symmetric(m);
  return m;
}

std::string network_to_tsv(const WeightedNetwork& g) {
  std::string out;
  for (const auto& e : g.edges()) {
    out += g.nodes()[e.a];
    out += '\t';
    out += g.nodes()[e.b];
    out += '\t';
    out += format_value(e.weight);
    out += '\n';
  }
  return out;
}

WeightedNetwork network_from_tsv(std::istream& in, std::optional<NetworkKind> kind) {
  std::vector<std::string> nodes;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<WeightedEdge> edges;
  auto node = [&](const std::string& id) {
    auto [it, inserted] = index.emplace(id, nodes.size());
    if (inserted) nodes.push_back(id);
    return it->second;
  };
  std::string line;
  std::size_t line_no = 0;
  bool all_binary = true;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty() || line.front() == '#') continue;
    auto cells = split(line, '\t');
    if (cells.size() != 3 || cells[0].empty() || cells[1].empty()) {
      throw Error(ErrorCode::MalformedNetwork, "expected node_a<TAB>node_b<TAB>weight", line_no);
    }
    double w = parse_double(cells[2], ErrorCode::MalformedNetwork, line_no);
    all_binary = all_binary && (w == 0.5 || w == 1.0);
    auto a = node(cells[0]);
    auto b = node(cells[1]);
    edges.push_back({a, b, w});
  }
  if (edges.empty()) throw Error(ErrorCode::MalformedNetwork, "no edges");
  NetworkKind k = kind.value_or(all_binary ? NetworkKind::Pruned : NetworkKind::Raw);
  return WeightedNetwork(std::move(nodes), std::move(edges), k);
}

Json network_to_json(const WeightedNetwork& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"source", g.nodes()[e.a]}, {"target", g.nodes()[e.b]}, {"weight", e.weight}});
  }
  Json j;
  j["kind"] = std::string(to_string(g.kind()));
  j["nodes"] = g.nodes();
  j["edges"] = std::move(edges);
  return j;
}

WeightedNetwork network_from_json(const Json& j) {
  try {
    auto kind = parse_network_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::MalformedNetwork, "kind must be raw or pruned");
    auto nodes = j.at("nodes").get<std::vector<std::string>>();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], i);
    std::vector<WeightedEdge> edges;
    for (const auto& e : j.at("edges")) {
      auto a = index.find(e.at("source").get<std::string>());
      auto b = index.find(e.at("target").get<std::string>());
      if (a == index.end() || b == index.end()) throw Error(ErrorCode::MalformedNetwork, "edge to unknown node");
      edges.push_back({a->second, b->second, e.at("weight").get<double>()});
    }
    return WeightedNetwork(std::move(nodes), std::move(edges), *kind);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedNetwork, e.what());
  }
}

Json spectral_report_to_json(const SpectralReport& r) {
  return Json{{"alpha", r.alpha},
              {"eigenvalues", r.eigenvalues},
              {"zero_count", r.zero_count},
              {"fiedler_value", r.fiedler_value},
              {"nearly_disconnected", r.nearly_disconnected},
              {"node_count", r.node_count},
              {"edge_count", r.edge_count},
              {"empty", r.empty}};
}

Json prune_result_to_json(const PruneResult& r) {
  Json iterations = Json::array();
  for (const auto& it : r.iterations) iterations.push_back(spectral_report_to_json(it));
  return Json{{"converged", r.converged},
              {"final_alpha", r.final_alpha},
              {"iterations", std::move(iterations)},
              {"pruned", network_to_json(r.pruned)}};
}

Json threshold_config_to_json(const ThresholdConfig& cfg) {
  return Json{{"alpha_start", cfg.alpha_start},
              {"alpha_step", cfg.alpha_step},
              {"alpha_max", cfg.alpha_max},
              {"fiedler_tolerance", cfg.fiedler_tolerance},
              {"laplacian_kind", std::string(to_string(cfg.laplacian_kind))},
              {"spectrum_size", cfg.spectrum_size}};
}

ThresholdConfig threshold_config_from_json(const Json& j) {
  ThresholdConfig cfg;
  if (j.is_null()) return cfg;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "threshold_config must be an object");
  try {
    if (j.contains("alpha_start")) cfg.alpha_start = j["alpha_start"].get<double>();
    if (j.contains("alpha_step")) cfg.alpha_step = j["alpha_step"].get<double>();
    if (j.contains("alpha_max")) cfg.alpha_max = j["alpha_max"].get<double>();
    if (j.contains("fiedler_tolerance")) cfg.fiedler_tolerance = j["fiedler_tolerance"].get<double>();
    if (j.contains("spectrum_size")) cfg.spectrum_size = j["spectrum_size"].get<std::size_t>();
    if (j.contains("laplacian_kind")) {
      auto kind = parse_laplacian_kind(j["laplacian_kind"].get<std::string>());
      if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown laplacian_kind");
      cfg.laplacian_kind = *kind;
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  return cfg;
}

Json partition_to_json(const Partition& p) {
  Json assignment = Json::object();
  for (std::size_t i = 0; i < p.nodes.size(); ++i) assignment[p.nodes[i]] = p.labels[i];
  return Json{{"assignment", std::move(assignment)},
              {"community_count", p.community_count()},
              {"modularity", p.modularity}};
}

Json coherence_to_json(const CoherenceReport& r) {
  Json per = Json::object();
  for (const auto& [label, mean] : r.per_community) per[std::to_string(label)] = mean;
  Json pairs = Json::object();
  for (const auto& [label, count] : r.pair_counts) pairs[std::to_string(label)] = count;
  return Json{{"per_community", std::move(per)},
              {"pair_counts", std::move(pairs)},
              {"overall_weighted_mean", r.overall_weighted_mean},
              {"defined", r.defined},
              {"modularity", r.modularity}};
}

std::string communities_summary_csv(const CoherenceReport& r) {
  std::string out = "community,size,coherence\n";
  for (const auto& [label, size] : r.sizes) {
    out += std::to_string(label) + "," + std::to_string(size) + ",";
    auto it = r.per_community.find(label);
    if (it != r.per_community.end()) out += format_value(it->second);
    out += '\n';
  }
  return out;
}

Json gaf_diagnostics_to_json(const GafDiagnostics& d) {
  return Json{{"skipped_unknown_term", d.skipped_unknown_term},
              {"skipped_not_qualifier", d.skipped_not_qualifier},
              {"malformed", d.malformed},
              {"skipped_evidence", d.skipped_evidence}};
}

}  // namespace ssn
