#include "ssn/threshold.hpp"

#include <cmath>
#include <optional>

#include "ssn/error.hpp"

namespace ssn {

void validate(const ThresholdConfig& cfg) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(cfg.alpha_start) || !finite(cfg.alpha_step) || !finite(cfg.alpha_max) ||
      !finite(cfg.fiedler_tolerance)) {
    throw Error(ErrorCode::InvalidConfig, "threshold parameters must be finite");
  }
  if (!(cfg.alpha_step > 0.0)) throw Error(ErrorCode::InvalidConfig, "alpha_step must be > 0");
  if (!(cfg.fiedler_tolerance > 0.0)) throw Error(ErrorCode::InvalidConfig, "fiedler_tolerance must be > 0");
  if (cfg.alpha_start > cfg.alpha_max) throw Error(ErrorCode::InvalidConfig, "alpha_start must be <= alpha_max");
  if (cfg.spectrum_size < 3) throw Error(ErrorCode::InvalidConfig, "spectrum_size must be >= 3");
}

namespace {

double threshold_from(const std::vector<std::pair<std::size_t, double>>& incident, double alpha) {
  const double degree = static_cast<double>(incident.size());
  double sum = 0.0;
  for (const auto& [_, w] : incident) sum += w;
  const double mean = sum / degree;
  double sq = 0.0;
  for (const auto& [_, w] : incident) sq += (w - mean) * (w - mean);
  return mean + alpha * std::sqrt(sq / degree);
}

}  // namespace

double local_threshold(const WeightedNetwork& g, std::size_t node, double alpha) {
  auto adj = g.adjacency();
  if (node >= adj.size()) throw Error(ErrorCode::IdMismatch, "node index out of range");
  if (adj[node].size() < 2) {
    throw Error(ErrorCode::DegreeTooLow, g.nodes()[node] + " has degree " + std::to_string(adj[node].size()));
  }
  return threshold_from(adj[node], alpha);
}

WeightedNetwork prune_once(const WeightedNetwork& g, double alpha) {
  if (g.kind() != NetworkKind::Raw) throw Error(ErrorCode::InvalidConfig, "prune_once expects a raw network");
  auto adj = g.adjacency();
  const std::size_t n = g.node_count();

  std::vector<std::optional<double>> threshold(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (adj[i].size() >= 2) threshold[i] = threshold_from(adj[i], alpha);
  }

  std::vector<WeightedEdge> kept;
  std::vector<bool> touched(n, false);
  for (const auto& e : g.edges()) {
    const bool at_a = threshold[e.a] && e.weight > *threshold[e.a];
    const bool at_b = threshold[e.b] && e.weight > *threshold[e.b];
    if (!at_a && !at_b) continue;
    kept.push_back({e.a, e.b, at_a && at_b ? 1.0 : 0.5});
    touched[e.a] = touched[e.b] = true;
  }

  std::vector<std::size_t> remap(n, 0);
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    if (!touched[i]) continue;
    remap[i] = nodes.size();
    nodes.push_back(g.nodes()[i]);
  }
  for (auto& e : kept) {
    e.a = remap[e.a];
    e.b = remap[e.b];
  }
  return WeightedNetwork(std::move(nodes), std::move(kept), NetworkKind::Pruned);
}

PruneResult prune(const WeightedNetwork& g, const ThresholdConfig& cfg, const SpectralOptions& options) {
  validate(cfg);
  if (g.node_count() < 3) {
    throw Error(ErrorCode::TooSmall, "pruning needs at least 3 nodes, got " + std::to_string(g.node_count()));
  }
  PruneResult result;
  std::optional<WeightedNetwork> last;
  double last_alpha = cfg.alpha_start;

  // alpha_i = start + i * step; the slack absorbs rounding at the upper end.
  const double slack = 1e-12 * std::max(1.0, std::abs(cfg.alpha_max));
  for (std::size_t i = 0;; ++i) {
    const double alpha = cfg.alpha_start + static_cast<double>(i) * cfg.alpha_step;
    if (alpha > cfg.alpha_max + slack) break;

    auto candidate = prune_once(g, alpha);
    if (candidate.edge_count() == 0) {
      SpectralReport report;
      report.alpha = alpha;
      report.empty = true;
      result.iterations.push_back(report);
      if (!last) last_alpha = alpha;
      break;
    }
    auto report = laplacian_spectrum(candidate, cfg.laplacian_kind, cfg.spectrum_size, options);
    report.alpha = alpha;
    report.nearly_disconnected = detect_nearly_disconnected(report, cfg.fiedler_tolerance);
    result.iterations.push_back(report);
    last = std::move(candidate);
    last_alpha = alpha;
    if (report.nearly_disconnected) {
      result.converged = true;
      break;
    }
  }

  if (last) result.pruned = std::move(*last);
  else result.pruned = WeightedNetwork({}, {}, NetworkKind::Pruned);
  result.final_alpha = last_alpha;
  return result;
}

}  // namespace ssn
