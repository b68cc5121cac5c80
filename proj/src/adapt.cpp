#include "netrecon/adapt.hpp"

#include <algorithm>
#include <cmath>

#include "netrecon/error.hpp"

namespace netrecon {

namespace {
constexpr const char* kStage = "adapt";
constexpr double kRankTolerance = 1e-10;
}  // namespace

Eigen::MatrixXd empirical_gram(const LibraryMatrix& lib) {
  Eigen::MatrixXd g = lib.values.transpose() * lib.values;
  // Exact symmetry; the product is symmetric only up to rounding.
  return 0.5 * (g + g.transpose());
}

AdaptedLibrary adapt_basis(const LibraryMatrix& lib) {
  const int rows = lib.rows();
  const int m = lib.columns();
  if (m > rows) throw Error(kStage, "more columns than samples; library cannot be orthonormalized");
  AdaptedLibrary out;
  out.ortho = lib;
  out.ortho.column_scales = Eigen::VectorXd::Ones(m);
  out.r_factor = Eigen::MatrixXd::Zero(m, m);
  auto& q = out.ortho.values;

  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd v = lib.values.col(j);
    const double original = v.norm();
    if (original == 0.0) throw Error(kStage, "zero column " + lib.descriptors[j].label());
    if (j > 0) {
      // Classical Gram-Schmidt, twice.
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd c = q.leftCols(j).transpose() * v;
        v -= q.leftCols(j) * c;
        out.r_factor.col(j).head(j) += c;
      }
    }
    const double residual = v.norm();
    if (residual < kRankTolerance * original)
      throw Error(kStage, "rank deficient library: column " + lib.descriptors[j].label() +
                              " depends on earlier columns");
    out.r_factor(j, j) = residual;
    q.col(j) = v / residual;
  }
  return out;
}

double coherence(const Eigen::MatrixXd& columns) {
  const Eigen::Index m = columns.cols();
  if (m < 2) return 0.0;
  Eigen::MatrixXd normalized = columns;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double norm = columns.col(j).norm();
    if (norm == 0.0) throw Error(kStage, "coherence undefined for a zero column");
    normalized.col(j) /= norm;
  }
  const Eigen::MatrixXd g = normalized.transpose() * normalized;
  double eta = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) eta = std::max(eta, std::abs(g(i, j)));
  return std::min(eta, 1.0);
}

double coherence(const LibraryMatrix& lib) { return coherence(lib.values); }

double rip_bound(double eta, int s) {
  if (s < 2) throw Error(kStage, "restricted isometry bound needs s >= 2");
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(kStage, "coherence must lie in [0, 1]");
  return eta * (s - 1);
}

SupportCheck sparsity_preserved(const Eigen::MatrixXd& r_factor, const Eigen::VectorXd& x) {
  if (r_factor.rows() != r_factor.cols() || r_factor.cols() != x.size())
    throw Error(kStage, "factor and vector dimensions disagree");
  if (!r_factor.isUpperTriangular(0.0)) throw Error(kStage, "factor must be upper triangular");
  int s = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) s = static_cast<int>(i) + 1;
  const Eigen::VectorXd y = r_factor.triangularView<Eigen::Upper>() * x;
  SupportCheck check;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0.0) check.support.push_back(static_cast<int>(i));
  check.preserved = check.support.empty() || check.support.back() < s;
  return check;
}

}  // namespace netrecon
