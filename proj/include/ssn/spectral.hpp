#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "ssn/network.hpp"

namespace ssn {

enum class LaplacianKind { Combinatorial, SymmetricNormalized };

std::string_view to_string(LaplacianKind kind);
std::optional<LaplacianKind> parse_laplacian_kind(std::string_view text);

/// Eigenvalues below this count as zero.
inline constexpr double kZeroEigenvalue = 1e-9;

struct SpectralOptions {
  /// Graphs (and components) up to this many nodes use the dense solver.
  std::size_t dense_limit = 2000;
  /// Required ||Lv - lambda v|| for the iterative solver.
  double residual_tolerance = 1e-8;
  std::size_t max_iterations = 2000;
};

struct SpectralReport {
  double alpha = 0.0;
  /// Smallest eigenvalues, ascending.
  std::vector<double> eigenvalues;
  /// Zero eigenvalues, i.e. connected components.
  std::size_t zero_count = 0;
  /// Smallest nonzero eigenvalue of the largest component (0 for a single node).
  double fiedler_value = 0.0;
  bool nearly_disconnected = false;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  /// Set for an iteration whose candidate graph had no edges.
  bool empty = false;
};

/// L = D - W, or I - D^-1/2 W D^-1/2 with zero rows for isolated nodes.
Eigen::MatrixXd dense_laplacian(const WeightedNetwork& g, LaplacianKind kind);
Eigen::SparseMatrix<double> sparse_laplacian(const WeightedNetwork& g, LaplacianKind kind);

/// The `count` smallest eigenvalues of a symmetric positive semi-definite
/// sparse matrix by shift-invert subspace iteration. Throws
/// Error(SolverFailure) when the residual bound is not met.
std::vector<double> smallest_eigenvalues_iterative(const Eigen::SparseMatrix<double>& laplacian, std::size_t count,
                                                   const SpectralOptions& options = {});

/// Throws Error(EmptyGraph) for a graph without nodes.
SpectralReport laplacian_spectrum(const WeightedNetwork& g, LaplacianKind kind, std::size_t k = 3,
                                  const SpectralOptions& options = {});

/// Disconnected, or Fiedler value under `tolerance`.
bool detect_nearly_disconnected(const SpectralReport& report, double tolerance);

}  // namespace ssn
