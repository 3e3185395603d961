#include "ssn/community.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <tuple>
#include <unordered_map>

#include "ssn/error.hpp"

namespace ssn {

std::size_t Partition::community_count() const {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

namespace {

struct Candidate {
  double gain;
  std::size_t lo;
  std::size_t hi;
  std::uint64_t lo_version;
  std::uint64_t hi_version;
};

struct CandidateOrder {
  bool operator()(const Candidate& x, const Candidate& y) const {
    if (x.gain != y.gain) return x.gain < y.gain;
    return std::tie(x.lo, x.hi) > std::tie(y.lo, y.hi);
  }
};

// Fisher-Yates over mt19937_64 so the permutation is identical on every
// standard library.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
  return perm;
}

std::vector<std::size_t> densify(const std::vector<std::size_t>& raw) {
  std::unordered_map<std::size_t, std::size_t> mapping;
  std::vector<std::size_t> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = mapping.emplace(raw[i], mapping.size());
    out[i] = it->second;
  }
  return out;
}

}  // namespace

Partition GreedyModularity::detect(const WeightedNetwork& g, std::uint64_t seed) const {
  if (g.empty()) throw Error(ErrorCode::EmptyGraph, "community detection on a graph without nodes");
  const std::size_t n = g.node_count();
  const auto perm = seeded_permutation(n, seed);

  double total_weight = 0.0;
  for (const auto& e : g.edges()) total_weight += e.weight;

  std::vector<double> strength(n, 0.0);
  std::vector<std::map<std::size_t, double>> links(n);
  for (const auto& e : g.edges()) {
    auto ca = perm[e.a];
    auto cb = perm[e.b];
    strength[ca] += e.weight;
    strength[cb] += e.weight;
    links[ca][cb] += e.weight;
    links[cb][ca] += e.weight;
  }

  std::vector<std::size_t> owner(n);
  std::iota(owner.begin(), owner.end(), 0);
  std::vector<bool> alive(n, true);
  std::vector<std::uint64_t> version(n, 0);

  if (total_weight > 0.0) {
    const double m = total_weight;
    auto gain = [&](std::size_t c, std::size_t d, double between) {
      return between / m - strength[c] * strength[d] / (2.0 * m * m);
    };
    std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> heap;
    for (std::size_t c = 0; c < n; ++c) {
      for (const auto& [d, w] : links[c]) {
        if (c < d) heap.push({gain(c, d, w), c, d, 0, 0});
      }
    }
    while (!heap.empty()) {
      Candidate top = heap.top();
      heap.pop();
      if (!alive[top.lo] || !alive[top.hi] || version[top.lo] != top.lo_version ||
          version[top.hi] != top.hi_version) {
        continue;
      }
      if (!(top.gain > 0.0)) break;

      const std::size_t keep = top.lo;
      const std::size_t gone = top.hi;
      for (const auto& [x, w] : links[gone]) {
        if (x == keep) continue;
        links[keep][x] += w;
        links[x][keep] += w;
        links[x].erase(gone);
      }
      links[keep].erase(gone);
      links[gone].clear();
      strength[keep] += strength[gone];
      alive[gone] = false;
      owner[gone] = keep;
      ++version[keep];
      for (const auto& [x, w] : links[keep]) {
        auto lo = std::min(keep, x);
        auto hi = std::max(keep, x);
        heap.push({gain(lo, hi, w), lo, hi, version[lo], version[hi]});
      }
    }
  }

  auto resolve = [&](std::size_t c) {
    while (owner[c] != c) c = owner[c];
    return c;
  };
  std::vector<std::size_t> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = resolve(perm[i]);

  Partition p;
  p.nodes = g.nodes();
  p.labels = densify(raw);
  p.modularity = modularity(g, p);
  return p;
}

Partition detect_communities(const WeightedNetwork& g, std::uint64_t seed) {
  return GreedyModularity{}.detect(g, seed);
}

double modularity(const WeightedNetwork& g, const Partition& p) {
  if (p.nodes != g.nodes() || p.labels.size() != p.nodes.size()) {
    throw Error(ErrorCode::LabelMismatch, "partition does not label the network's nodes");
  }
  const std::size_t k = p.community_count();
  {
    std::vector<bool> used(k, false);
    for (auto l : p.labels) used[l] = true;
    if (std::find(used.begin(), used.end(), false) != used.end()) {
      throw Error(ErrorCode::LabelMismatch, "community labels are not dense");
    }
  }
  double two_m = 0.0;
  for (const auto& e : g.edges()) two_m += 2.0 * e.weight;
  if (two_m == 0.0) return 0.0;

  std::vector<double> inside(k, 0.0);
  for (const auto& e : g.edges()) {
    if (p.labels[e.a] == p.labels[e.b]) inside[p.labels[e.a]] += 2.0 * e.weight;
  }
  std::vector<double> total(k, 0.0);
  for (const auto& e : g.edges()) {
    total[p.labels[e.a]] += e.weight;
    total[p.labels[e.b]] += e.weight;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    double share = total[c] / two_m;
    q += inside[c] / two_m - share * share;
  }
  return q;
}

CoherenceReport coherence(const Partition& p, const SimilarityMatrix& m) {
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < m.ids.size(); ++i) position.emplace(m.ids[i], i);

  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    auto it = position.find(p.nodes[i]);
    if (it == position.end()) throw Error(ErrorCode::IdMismatch, p.nodes[i] + " is not in the similarity matrix");
    members[p.labels[i]].push_back(it->second);
  }

  CoherenceReport report;
  report.modularity = p.modularity;
  double grand_sum = 0.0;
  std::size_t grand_pairs = 0;
  for (const auto& [label, rows] : members) {
    report.sizes[label] = rows.size();
    if (rows.size() < 2) continue;
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = a + 1; b < rows.size(); ++b) {
        sum += m.at(rows[a], rows[b]);
        ++pairs;
      }
    }
    report.per_community[label] = sum / static_cast<double>(pairs);
    report.pair_counts[label] = pairs;
    grand_sum += sum;
    grand_pairs += pairs;
  }
  report.defined = grand_pairs > 0;
  report.overall_weighted_mean = report.defined ? grand_sum / static_cast<double>(grand_pairs) : 0.0;
  return report;
}

}  // namespace ssn
