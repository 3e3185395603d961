#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "graphs.hpp"
#include "ssn/error.hpp"
#include "ssn/network.hpp"
#include "ssn/threshold.hpp"

using namespace ssn;
using namespace ssn::testing;

namespace {

using PairSet = std::set<std::pair<std::string, std::string>>;

PairSet pairs(const WeightedNetwork& g) {
  PairSet out;
  for (const auto& e : g.edges()) out.emplace(g.nodes()[e.a], g.nodes()[e.b]);
  return out;
}

std::map<std::pair<std::string, std::string>, double> weights(const WeightedNetwork& g) {
  std::map<std::pair<std::string, std::string>, double> out;
  for (const auto& e : g.edges()) out[{g.nodes()[e.a], g.nodes()[e.b]}] = e.weight;
  return out;
}

// Trace of the pruning rule written out per edge, no shared helpers.
std::map<std::pair<std::string, std::string>, double> traced(const WeightedNetwork& g, double alpha) {
  std::vector<std::vector<double>> incident(g.node_count());
  for (const auto& e : g.edges()) {
    incident[e.a].push_back(e.weight);
    incident[e.b].push_back(e.weight);
  }
  auto passes = [&](std::size_t u, double w) {
    const auto& ws = incident[u];
    if (ws.size() < 2) return false;
    double mean = 0;
    for (double x : ws) mean += x;
    mean /= ws.size();
    double var = 0;
    for (double x : ws) var += (x - mean) * (x - mean);
    var /= ws.size();
    return w > mean + alpha * std::sqrt(var);
  };
  std::map<std::pair<std::string, std::string>, double> out;
  for (const auto& e : g.edges()) {
    int votes = passes(e.a, e.weight) + passes(e.b, e.weight);
    if (votes == 2) out[{g.nodes()[e.a], g.nodes()[e.b]}] = 1.0;
    if (votes == 1) out[{g.nodes()[e.a], g.nodes()[e.b]}] = 0.5;
  }
  return out;
}

}  // namespace

TEST_CASE("network invariants are validated") {
  CHECK_THROWS_AS(network(2, {{0, 0, 0.5}}), Error);
  CHECK_THROWS_AS(network(2, {{0, 1, 0.0}}), Error);
  CHECK_THROWS_AS(network(2, {{0, 1, 1.5}}), Error);
  CHECK_THROWS_AS(network(2, {{0, 1, 0.5}, {1, 0, 0.5}}), Error);
  CHECK_THROWS_AS(network(2, {{0, 2, 0.5}}), Error);
  CHECK_THROWS_AS(network(3, {{0, 1, 0.7}}, NetworkKind::Pruned), Error);
  CHECK_THROWS_AS(network(3, {{0, 1, 1.0}}, NetworkKind::Pruned), Error);  // isolated node 2
  CHECK_NOTHROW(network(3, {{0, 1, 0.5}, {1, 2, 1.0}}, NetworkKind::Pruned));
  CHECK_THROWS_AS(WeightedNetwork({"a", "a"}, {}, NetworkKind::Raw), Error);
}

TEST_CASE("build_ssn links every positive pair") {
  SUBCASE("identity matrix") {
    auto g = build_ssn(matrix(5, {}));
    CHECK(g.node_count() == 5);
    CHECK(g.edge_count() == 0);
  }
  SUBCASE("all ones") {
    auto g = build_ssn(matrix(4, complete_edges(4, 1.0)));
    CHECK(g.edge_count() == 6);
    for (const auto& e : g.edges()) CHECK(e.weight == 1.0);
  }
  SUBCASE("counts nonzero off-diagonal entries") {
    auto m = matrix(5, {{0, 1, 0.3}, {1, 2, 0.0}, {3, 4, 0.9}, {0, 4, 1e-9}});
    auto g = build_ssn(m);
    CHECK(g.edge_count() == 3);
    CHECK(g.kind() == NetworkKind::Raw);
  }
}

TEST_CASE("connected components by traversal") {
  auto g = network(6, {{0, 1, 0.5}, {1, 2, 0.5}, {4, 5, 0.5}});
  CHECK(connected_components(g) == std::vector<std::size_t>{0, 0, 0, 1, 2, 2});
  CHECK(component_count(g) == 3);
}

TEST_CASE("local threshold is mean plus alpha population sd") {
  auto g = network(4, {{0, 1, 0.4}, {0, 2, 0.5}, {0, 3, 0.9}});
  CHECK(local_threshold(g, 0, 0.0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(local_threshold(g, 0, 1.0) == doctest::Approx(0.6 + std::sqrt(0.14 / 3)).epsilon(1e-14));
  CHECK(local_threshold(g, 0, 1.0) == doctest::Approx(0.8160246).epsilon(1e-7));
  auto flat = network(3, {{0, 1, 0.7}, {0, 2, 0.7}});
  for (double a : {0.0, 0.5, 3.0}) CHECK(local_threshold(flat, 0, a) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK_THROWS_WITH_AS(local_threshold(g, 1, 0.0), doctest::Contains("DegreeTooLow"), Error);
  CHECK_THROWS_AS(local_threshold(g, 9, 0.0), Error);
}

TEST_CASE("prune_once hand traces") {
  SUBCASE("uniform triangle empties") {
    auto p = prune_once(complete(3, 0.8), 0.0);
    CHECK(p.empty());
    CHECK(p.edge_count() == 0);
    CHECK(p.kind() == NetworkKind::Pruned);
  }
  SUBCASE("four-node path") {
    auto g = network(4, {{0, 1, 0.9}, {1, 2, 0.1}, {2, 3, 0.9}});
    auto p = prune_once(g, 0.0);
    std::map<std::pair<std::string, std::string>, double> want = {{{"n000", "n001"}, 0.5}, {{"n002", "n003"}, 0.5}};
    CHECK(weights(p) == want);
    CHECK(p.nodes() == std::vector<std::string>{"n000", "n001", "n002", "n003"});
  }
  SUBCASE("two triangles and a weak bridge") {
    auto e = complete_edges(3, 0.9);
    auto f = complete_edges(3, 0.9, 3);
    e.insert(e.end(), f.begin(), f.end());
    e.emplace_back(2, 3, 0.2);
    auto g = network(6, e);
    auto p = prune_once(g, 0.0);
    CHECK(weights(p) == traced(g, 0.0));
    CHECK_FALSE(pairs(p).count({"n002", "n003"}));
  }
  SUBCASE("rejects pruned input") {
    CHECK_THROWS_AS(prune_once(network(2, {{0, 1, 1.0}}, NetworkKind::Pruned), 0.0), Error);
  }
}

TEST_CASE("prune_once properties on random networks") {
  std::mt19937_64 rng(42);
  for (int round = 0; round < 60; ++round) {
    auto g = random_network(rng, 4 + round % 25, 0.35);
    auto raw_pairs = pairs(g);
    PairSet previous;
    bool first = true;
    for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
      auto p = prune_once(g, alpha);
      CHECK(weights(p) == traced(g, alpha));
      auto kept = pairs(p);
      for (const auto& pr : kept) CHECK(raw_pairs.count(pr));
      for (const auto& e : p.edges()) CHECK((e.weight == 0.5 || e.weight == 1.0));
      for (auto d : p.degrees()) CHECK(d > 0);
      if (!first)
        for (const auto& pr : kept) CHECK(previous.count(pr));
      previous = kept;
      first = false;
    }
  }
}

TEST_CASE("threshold config validation") {
  ThresholdConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.alpha_max = -1.0;
  CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("InvalidConfig"), Error);
  cfg = {};
  cfg.alpha_step = 0.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = {};
  cfg.fiedler_tolerance = 0.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = {};
  cfg.spectrum_size = 2;
  CHECK_THROWS_AS(validate(cfg), Error);
}

TEST_CASE("prune converges on two triangles at the first alpha") {
  EdgeList e = {{0, 1, 0.9}, {1, 2, 0.8}, {0, 2, 0.7}, {3, 4, 0.9}, {4, 5, 0.8}, {3, 5, 0.7}};
  auto r = prune(network(6, e));
  CHECK(r.converged);
  CHECK(r.final_alpha == 0.0);
  REQUIRE(r.iterations.size() == 1);
  CHECK(r.iterations[0].zero_count == 2);
  CHECK(component_count(r.pruned) == 2);
}

TEST_CASE("prune on the barbell removes the bridge") {
  auto r = prune(barbell());
  CHECK(r.converged);
  CHECK_FALSE(r.iterations.empty());
  CHECK(r.iterations.back().nearly_disconnected);
  // bridge removed outright, or kept with a weak enough coupling
  const auto& last = r.iterations.back();
  CHECK((last.zero_count >= 2 || last.fiedler_value < 0.05));
  CHECK_FALSE(pairs(r.pruned).count({"n003", "n004"}));
  CHECK(last.zero_count == 2);
}

TEST_CASE("prune on a uniform complete graph falls back") {
  auto r = prune(complete(6, 0.7));
  CHECK_FALSE(r.converged);
  REQUIRE(r.iterations.size() == 1);
  CHECK(r.iterations[0].empty);
  CHECK(r.pruned.empty());
}

TEST_CASE("prune keeps the last non-empty candidate when the next one empties") {
  // Stays a connected path a-b-c until alpha reaches 1, then nothing passes.
  auto g = network(3, {{0, 1, 0.9}, {1, 2, 0.8}, {0, 2, 0.7}});
  ThresholdConfig cfg;
  auto r = prune(g, cfg);
  CHECK_FALSE(r.converged);
  REQUIRE(r.iterations.size() >= 2);
  for (std::size_t i = 0; i < r.iterations.size(); ++i)
    CHECK(r.iterations[i].alpha == doctest::Approx(cfg.alpha_start + i * cfg.alpha_step));
  CHECK(r.iterations.back().empty);
  CHECK_FALSE(r.iterations.front().empty);
  CHECK(r.pruned.edge_count() == 2);
  CHECK(r.pruned == prune_once(g, r.final_alpha));
  CHECK(r.final_alpha == r.iterations[r.iterations.size() - 2].alpha);

  auto again = prune(g, cfg);
  CHECK(again.pruned == r.pruned);
  CHECK(again.final_alpha == r.final_alpha);
  CHECK(again.iterations.size() == r.iterations.size());
}

TEST_CASE("prune stops at alpha_max") {
  auto g = network(3, {{0, 1, 0.9}, {1, 2, 0.8}, {0, 2, 0.7}});
  ThresholdConfig cfg;
  cfg.alpha_max = 0.5;
  auto r = prune(g, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations.size() == 3);
  CHECK(r.final_alpha == 0.5);
}

TEST_CASE("prune needs three nodes") {
  CHECK_THROWS_WITH_AS(prune(network(2, {{0, 1, 0.5}})), doctest::Contains("TooSmall"), Error);
}
