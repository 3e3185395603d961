#include "ssn/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>

#include "ssn/error.hpp"

namespace ssn {

std::string_view to_string(LaplacianKind kind) {
  return kind == LaplacianKind::Combinatorial ? "combinatorial" : "symmetric-normalized";
}

std::optional<LaplacianKind> parse_laplacian_kind(std::string_view text) {
  if (text == "combinatorial") return LaplacianKind::Combinatorial;
  if (text == "symmetric-normalized" || text == "normalized") return LaplacianKind::SymmetricNormalized;
  return std::nullopt;
}

namespace {

std::vector<double> weighted_degrees(const WeightedNetwork& g) {
  std::vector<double> d(g.node_count(), 0.0);
  for (const auto& e : g.edges()) {
    d[e.a] += e.weight;
    d[e.b] += e.weight;
  }
  return d;
}

std::vector<Eigen::Triplet<double>> laplacian_triplets(const WeightedNetwork& g, LaplacianKind kind) {
  auto d = weighted_degrees(g);
  std::vector<Eigen::Triplet<double>> out;
  out.reserve(g.node_count() + 2 * g.edge_count());
  const auto n = static_cast<Eigen::Index>(g.node_count());
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = kind == LaplacianKind::Combinatorial ? d[i] : (d[i] > 0.0 ? 1.0 : 0.0);
    out.emplace_back(i, i, diag);
  }
  for (const auto& e : g.edges()) {
    double w = e.weight;
    if (kind == LaplacianKind::SymmetricNormalized) w /= std::sqrt(d[e.a]) * std::sqrt(d[e.b]);
    out.emplace_back(static_cast<Eigen::Index>(e.a), static_cast<Eigen::Index>(e.b), -w);
    out.emplace_back(static_cast<Eigen::Index>(e.b), static_cast<Eigen::Index>(e.a), -w);
  }
  return out;
}

WeightedNetwork induced_subgraph(const WeightedNetwork& g, const std::vector<std::size_t>& labels, std::size_t which) {
  std::vector<std::size_t> remap(g.node_count(), static_cast<std::size_t>(-1));
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (labels[i] == which) {
      remap[i] = nodes.size();
      nodes.push_back(g.nodes()[i]);
    }
  }
  std::vector<WeightedEdge> edges;
  for (const auto& e : g.edges()) {
    if (labels[e.a] == which) edges.push_back({remap[e.a], remap[e.b], e.weight});
  }
  return WeightedNetwork(std::move(nodes), std::move(edges), g.kind());
}

std::vector<double> smallest_eigenvalues(const WeightedNetwork& g, LaplacianKind kind, std::size_t count,
                                         const SpectralOptions& options) {
  count = std::min(count, g.node_count());
  if (g.node_count() <= options.dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_laplacian(g, kind), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "dense eigensolver did not converge");
    const auto& ev = solver.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + count);
  }
  return smallest_eigenvalues_iterative(sparse_laplacian(g, kind), count, options);
}

}  // namespace

Eigen::MatrixXd dense_laplacian(const WeightedNetwork& g, LaplacianKind kind) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : laplacian_triplets(g, kind)) L(t.row(), t.col()) += t.value();
  return L;
}

Eigen::SparseMatrix<double> sparse_laplacian(const WeightedNetwork& g, LaplacianKind kind) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::SparseMatrix<double> L(n, n);
  auto triplets = laplacian_triplets(g, kind);
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

std::vector<double> smallest_eigenvalues_iterative(const Eigen::SparseMatrix<double>& laplacian, std::size_t count,
                                                   const SpectralOptions& options) {
  const Eigen::Index n = laplacian.rows();
  const auto want = static_cast<Eigen::Index>(std::min<std::size_t>(count, static_cast<std::size_t>(n)));
  if (want == 0) return {};
  const Eigen::Index block = std::min<Eigen::Index>(n, 2 * want + 8);

  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) max_diag = std::max(max_diag, laplacian.coeff(i, i));
  const double shift = 1e-3 * std::max(1.0, max_diag);

  Eigen::SparseMatrix<double> shifted = laplacian;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(shifted);
  if (factor.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "factorisation of L + sigma I failed");

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd X(n, block);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = normal(rng);

  auto orthonormal = [&](const Eigen::MatrixXd& M) -> Eigen::MatrixXd {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    return qr.householderQ() * Eigen::MatrixXd::Identity(M.rows(), M.cols());
  };

  X = orthonormal(X);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    Eigen::MatrixXd Y = factor.solve(X);
    Eigen::MatrixXd Q = orthonormal(Y);
    Eigen::MatrixXd LQ = laplacian * Q;
    Eigen::MatrixXd H = Q.transpose() * LQ;
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(H);
    X = Q * ritz.eigenvectors();
    Eigen::MatrixXd LX = LQ * ritz.eigenvectors();

    bool converged = true;
    for (Eigen::Index j = 0; j < want && converged; ++j) {
      double residual = (LX.col(j) - ritz.eigenvalues()(j) * X.col(j)).norm();
      converged = residual <= options.residual_tolerance;
    }
    if (converged) {
      const auto& ev = ritz.eigenvalues();
      return std::vector<double>(ev.data(), ev.data() + want);
    }
  }
  throw Error(ErrorCode::SolverFailure, "subspace iteration did not reach the residual bound");
}

SpectralReport laplacian_spectrum(const WeightedNetwork& g, LaplacianKind kind, std::size_t k,
                                  const SpectralOptions& options) {
  if (g.empty()) throw Error(ErrorCode::EmptyGraph, "spectrum of a graph without nodes");
  SpectralReport report;
  report.node_count = g.node_count();
  report.edge_count = g.edge_count();

  auto labels = connected_components(g);
  const std::size_t components = *std::max_element(labels.begin(), labels.end()) + 1;
  const std::size_t n = g.node_count();

  // Large graphs: ask the iterative solver for enough values to see every zero.
  std::vector<double> ev;
  if (n <= options.dense_limit) {
    ev = smallest_eigenvalues(g, kind, n, options);
  } else {
    ev = smallest_eigenvalues(g, kind, std::max(k, components + 1), options);
  }
  report.zero_count = static_cast<std::size_t>(
      std::count_if(ev.begin(), ev.end(), [](double v) { return v < kZeroEigenvalue; }));
  report.eigenvalues.assign(ev.begin(), ev.begin() + static_cast<std::ptrdiff_t>(std::min(k, ev.size())));

  std::vector<std::size_t> sizes(components, 0);
  for (auto l : labels) ++sizes[l];
  const std::size_t largest =
      static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  if (sizes[largest] < 2) {
    report.fiedler_value = 0.0;
  } else if (components == 1) {
    report.fiedler_value = ev[1];
  } else {
    auto sub = induced_subgraph(g, labels, largest);
    report.fiedler_value = smallest_eigenvalues(sub, kind, 2, options)[1];
  }
  return report;
}

bool detect_nearly_disconnected(const SpectralReport& report, double tolerance) {
  if (report.empty) return false;
  return report.zero_count >= 2 || report.fiedler_value < tolerance;
}

}  // namespace ssn
