#pragma once

#include <compare>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "netrecon/signal.hpp"

namespace netrecon {

enum class Trig { Sin, Cos };

/// Identifies one library function. Node indices are 0-based.
///   Constant                -> 1
///   NodeHarmonic(l, h, f)   -> f(h * theta_l)
///   PairDiff(k, m, f), k<m  -> f(theta_k - theta_m)
struct ColumnDescriptor {
  enum class Kind { Constant, NodeHarmonic, PairDiff };

  Kind kind = Kind::Constant;
  int first = -1;    // node (NodeHarmonic) or k (PairDiff)
  int second = -1;   // m (PairDiff)
  int harmonic = 0;  // NodeHarmonic only
  Trig trig = Trig::Sin;

  static ColumnDescriptor constant();
  static ColumnDescriptor node_harmonic(int node, int harmonic, Trig trig);
  static ColumnDescriptor pair_diff(int k, int m, Trig trig);

  bool is_pair() const { return kind == Kind::PairDiff; }
  /// Human-readable label with 1-based node numbers, e.g. "sin(th1-th3)".
  std::string label() const;

  friend auto operator<=>(const ColumnDescriptor&, const ColumnDescriptor&) = default;
};

/// Evaluates a descriptor along the phase trajectory (no 1/sqrt(n) factor).
Eigen::VectorXd evaluate_column(const ColumnDescriptor& d, const Eigen::MatrixXd& phases);

/// Design matrix: rows are samples scaled by 1/sqrt(n'), one column per
/// descriptor. `column_scales` holds the factors divided out by
/// column_normalize (all ones for a raw library).
struct LibraryMatrix {
  Eigen::MatrixXd values;
  std::vector<ColumnDescriptor> descriptors;
  Eigen::VectorXd column_scales;

  int rows() const { return static_cast<int>(values.rows()); }
  int columns() const { return static_cast<int>(values.cols()); }
  /// Column position of a descriptor, or -1.
  int find(const ColumnDescriptor& d) const;
};

/// Phase derivatives with the same 1/sqrt(n') row scaling as the library, so
/// coefficients of Theta W = V are the physical ones.
struct TargetMatrix {
  Eigen::MatrixXd values;
};

/// Constant, sin/cos(theta_l) for every node, then sin/cos(theta_k - theta_m)
/// for every k < m: 1 + 2N + N(N-1) columns. With `first_harmonics_only`
/// false, node harmonics 2..10 are included as well.
std::pair<LibraryMatrix, TargetMatrix> build_library(const PhaseData& ph,
                                                     bool first_harmonics_only = true);

/// Seed columns (in seed order) and the remaining columns (in library order).
std::pair<LibraryMatrix, LibraryMatrix> select_columns(const LibraryMatrix& lib,
                                                       const std::vector<ColumnDescriptor>& seed);

/// Appends sin/cos(h * theta_node) for h = 2..max_harmonic as raw columns
/// (unit scale); existing columns are copied unchanged. The default gives the
/// 16 functions per node of the extension experiment.
LibraryMatrix extend_basis(const LibraryMatrix& lib, const PhaseData& ph, int node,
                           int max_harmonic = 9);

/// Divides every column by its Euclidean norm; the norms multiply into
/// column_scales.
LibraryMatrix column_normalize(const LibraryMatrix& lib);
/// Inverse of column_normalize; returns a library with unit scales.
LibraryMatrix denormalize(const LibraryMatrix& lib);

/// Coupling descriptors for the pair (a, b) in either order.
std::vector<ColumnDescriptor> pair_columns(int a, int b);

}  // namespace netrecon
