#include "netrecon/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "netrecon/error.hpp"

namespace netrecon {

namespace {

constexpr const char* kStage = "solvers";
constexpr double kPinvThreshold = 1e-10;

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// Largest deviation from the optimality conditions given the gradient of the
// smooth part.
double worst_violation(const Eigen::VectorXd& grad, double lambda, const Eigen::VectorXd& w,
                       const Eigen::VectorXd& weights) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const double t = lambda * (weights.size() ? weights[j] : 1.0);
    const double v = w[j] == 0.0 ? std::max(0.0, std::abs(grad[j]) - t)
                                 : std::abs(grad[j] + t * (w[j] > 0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

void check_weights(const Eigen::VectorXd& weights, Eigen::Index m) {
  if (weights.size() == 0) return;
  if (weights.size() != m) throw Error("solvers", "penalty weight vector has the wrong length");
  if ((weights.array() < 0.0).any() || !weights.allFinite())
    throw Error("solvers", "penalty weights must be finite and non-negative");
}

// Coordinate descent on ||X w - v||^2 + lambda ||w||_1 expressed through the
// Gram matrix G = X^T X and c = X^T v. Keeps r = c - G w up to date, so each
// coordinate update costs O(1) plus O(m) when the coefficient moves.
// Between sweeps the active set is polished: on a fixed sign pattern the
// objective is a smooth quadratic, so we step towards its minimizer and stop
// at the first sign change. Plain cyclic descent crawls on the badly
// conditioned libraries that short recordings produce.
class GramLasso {
 public:
  GramLasso(Eigen::MatrixXd gram, Eigen::VectorXd corr, Eigen::VectorXd weights)
      : g_(std::move(gram)), c_(std::move(corr)), p_(std::move(weights)) {
    if (p_.size() == 0) p_ = Eigen::VectorXd::Ones(c_.size());
  }

  int size() const { return static_cast<int>(c_.size()); }

  Eigen::VectorXd solve(double lambda, Eigen::VectorXd w, const LassoOptions& opts) const {
    const int m = size();
    if (w.size() == 0) w = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd r = c_ - g_ * w;
    const double half = 0.5 * lambda;
    int sweeps = 0;

    auto sweep = [&](bool active_only) {
      double max_change = 0.0;
      for (int j = 0; j < m; ++j) {
        if (active_only && w[j] == 0.0 && p_[j] != 0.0) continue;
        const double gjj = g_(j, j);
        if (gjj <= 0.0) continue;
        const double updated = soft_threshold(r[j] + gjj * w[j], half * p_[j]) / gjj;
        const double delta = updated - w[j];
        if (delta != 0.0) {
          r.noalias() -= g_.col(j) * delta;
          w[j] = updated;
          max_change = std::max(max_change, std::abs(delta));
        }
      }
      ++sweeps;
      if (opts.on_sweep) opts.on_sweep(w);
      return max_change;
    };

    auto polish = [&]() {
      std::vector<int> active;
      for (int j = 0; j < m; ++j)
        if (w[j] != 0.0 || p_[j] == 0.0) active.push_back(j);
      if (active.empty()) return;
      const auto s = static_cast<Eigen::Index>(active.size());
      Eigen::MatrixXd g_aa(s, s);
      Eigen::VectorXd rhs(s), current(s);
      for (Eigen::Index a = 0; a < s; ++a) {
        for (Eigen::Index b = 0; b < s; ++b) g_aa(a, b) = g_(active[a], active[b]);
        current[a] = w[active[a]];
        rhs[a] = c_[active[a]] - half * p_[active[a]] * (current[a] > 0.0 ? 1.0 : -1.0);
      }
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(g_aa);
      if (ldlt.info() != Eigen::Success) return;
      const Eigen::VectorXd target = ldlt.solve(rhs);
      if (!target.allFinite() || (g_aa * target - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) return;
      double step = 1.0;
      Eigen::Index blocking = -1;
      for (Eigen::Index a = 0; a < s; ++a) {
        if (p_[active[a]] == 0.0 || target[a] * current[a] > 0.0) continue;
        const double t = current[a] / (current[a] - target[a]);
        if (t < step) {
          step = t;
          blocking = a;
        }
      }
      Eigen::VectorXd next = current + step * (target - current);
      if (blocking >= 0) next[blocking] = 0.0;
      for (Eigen::Index a = 0; a < s; ++a) w[active[a]] = next[a];
      r = c_ - g_ * w;
    };

    while (sweeps < opts.max_sweeps) {
      sweep(false);
      for (int inner = 1; sweeps < opts.max_sweeps; ++inner) {
        if (sweep(true) < opts.tolerance) break;
        if (inner % 10 == 0) polish();
      }
      polish();
      if (violation_from_residual(lambda, w, r) <= opts.tolerance) return w;
    }
    std::ostringstream msg;
    msg << "coordinate descent did not converge in " << opts.max_sweeps
        << " sweeps; KKT violation " << violation(lambda, w);
    throw Error(kStage, msg.str());
  }

  double violation(double lambda, const Eigen::VectorXd& w) const {
    return violation_from_residual(lambda, w, c_ - g_ * w);
  }

 private:
  double violation_from_residual(double lambda, const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& r) const {
    return worst_violation(-2.0 * r, lambda, w, p_);
  }

  Eigen::MatrixXd g_;
  Eigen::VectorXd c_;
  Eigen::VectorXd p_;
};

void check_problem(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v) {
  if (theta.rows() == 0 || theta.cols() == 0) throw Error(kStage, "empty matrix");
  if (theta.rows() != v.size()) throw Error(kStage, "matrix rows and target length differ");
}

std::vector<Eigen::VectorXd> run_path(const GramLasso& solver, const std::vector<double>& grid,
                                      double lambda_factor, const LassoOptions& opts) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(grid.size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(solver.size());
  for (double lambda : grid) {
    w = solver.solve(lambda * lambda_factor, w, opts);
    out.push_back(w);
  }
  return out;
}

}  // namespace

Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& v) {
  check_problem(a, v);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = kPinvThreshold * (s.size() > 0 ? s[0] : 0.0);
  Eigen::VectorXd ut_v = svd.matrixU().transpose() * v;
  for (Eigen::Index i = 0; i < s.size(); ++i) ut_v[i] = s[i] > cutoff ? ut_v[i] / s[i] : 0.0;
  return svd.matrixV() * ut_v;
}

double min_singular_value(const Eigen::MatrixXd& theta) {
  if (theta.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(theta);
  return svd.singularValues().minCoeff();
}

double lasso_objective(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v, double lambda,
                       const Eigen::VectorXd& w, const Eigen::VectorXd& weights) {
  check_weights(weights, w.size());
  const double l1 = weights.size() ? weights.cwiseProduct(w).lpNorm<1>() : w.lpNorm<1>();
  return (theta * w - v).squaredNorm() + lambda * l1;
}

double kkt_violation(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v, double lambda,
                     const Eigen::VectorXd& w, const Eigen::VectorXd& weights) {
  check_problem(theta, v);
  check_weights(weights, theta.cols());
  return worst_violation(2.0 * theta.transpose() * (theta * w - v), lambda, w, weights);
}

double lambda_max(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v,
                  const Eigen::VectorXd& weights) {
  check_problem(theta, v);
  check_weights(weights, theta.cols());
  if (weights.size() == 0) return 2.0 * (theta.transpose() * v).cwiseAbs().maxCoeff();
  // Unpenalized columns are fitted first; the residual sets the threshold.
  std::vector<Eigen::Index> free;
  for (Eigen::Index j = 0; j < weights.size(); ++j)
    if (weights[j] == 0.0) free.push_back(j);
  Eigen::VectorXd residual = v;
  if (!free.empty()) {
    Eigen::MatrixXd x_free(theta.rows(), static_cast<Eigen::Index>(free.size()));
    for (std::size_t a = 0; a < free.size(); ++a) x_free.col(static_cast<Eigen::Index>(a)) = theta.col(free[a]);
    residual -= x_free * least_squares(x_free, v);
  }
  const Eigen::VectorXd corr = theta.transpose() * residual;
  double out = 0.0;
  for (Eigen::Index j = 0; j < weights.size(); ++j)
    if (weights[j] > 0.0) out = std::max(out, 2.0 * std::abs(corr[j]) / weights[j]);
  return out;
}

Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v, double lambda,
                         const Eigen::VectorXd& w_init, const LassoOptions& opts) {
  check_problem(theta, v);
  if (!(lambda >= 0.0)) throw Error(kStage, "lambda must be non-negative");
  if (w_init.size() != 0 && w_init.size() != theta.cols())
    throw Error(kStage, "warm start has the wrong length");
  check_weights(opts.penalty_weights, theta.cols());
  const GramLasso solver(theta.transpose() * theta, theta.transpose() * v, opts.penalty_weights);
  Eigen::VectorXd w = solver.solve(lambda, w_init, opts);
  const double viol = kkt_violation(theta, v, lambda, w, opts.penalty_weights);
  if (viol > opts.kkt_tolerance) {
    std::ostringstream msg;
    msg << "coordinate descent stopped with KKT violation " << viol;
    throw Error(kStage, msg.str());
  }
  return w;
}

std::vector<double> lambda_grid(double lmax, int grid_size, double decades) {
  if (grid_size < 2) throw Error(kStage, "lambda grid needs at least two values");
  if (!(decades > 0.0)) throw Error(kStage, "lambda grid must span a positive number of decades");
  std::vector<double> grid(grid_size);
  for (int k = 0; k < grid_size; ++k)
    grid[k] = lmax * std::pow(10.0, -decades * k / (grid_size - 1));
  return grid;
}

std::vector<int> LassoFit::support_sizes() const {
  std::vector<int> out;
  for (Eigen::Index k = 0; k < path.cols(); ++k)
    out.push_back(static_cast<int>((path.col(k).array() != 0.0).count()));
  return out;
}

LassoFit lasso_path(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v, int grid_size,
                    double decades, const LassoOptions& opts) {
  check_problem(theta, v);
  LassoFit fit;
  check_weights(opts.penalty_weights, theta.cols());
  fit.lambda_grid = lambda_grid(lambda_max(theta, v, opts.penalty_weights), grid_size, decades);
  const GramLasso solver(theta.transpose() * theta, theta.transpose() * v, opts.penalty_weights);
  const auto sols = run_path(solver, fit.lambda_grid, 1.0, opts);
  fit.path.resize(theta.cols(), grid_size);
  for (int k = 0; k < grid_size; ++k) fit.path.col(k) = sols[k];
  return fit;
}

LassoFit cross_validate(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v,
                        const CrossValidationOptions& opts) {
  check_problem(theta, v);
  const int n = static_cast<int>(theta.rows());
  const int k = opts.folds;
  if (k < 2) throw Error(kStage, "cross-validation needs at least two folds");
  if (n < k) throw Error(kStage, "too few rows for the requested number of folds");
  if (opts.column_scales.size() != 0 && opts.column_scales.size() != theta.cols())
    throw Error(kStage, "column scale vector has the wrong length");

  LassoFit fit = lasso_path(theta, v, opts.grid_size, opts.decades, opts.lasso);
  const int grid_size = static_cast<int>(fit.lambda_grid.size());
  const Eigen::MatrixXd gram = theta.transpose() * theta;
  const Eigen::VectorXd corr = theta.transpose() * v;

  std::vector<double> total(grid_size, 0.0);
  for (int f = 0; f < k; ++f) {
    const int begin = static_cast<int>(static_cast<long>(f) * n / k);
    const int end = static_cast<int>(static_cast<long>(f + 1) * n / k);
    const int held = end - begin;
    const auto x_held = theta.middleRows(begin, held);
    const auto v_held = v.segment(begin, held);
    const GramLasso solver(gram - x_held.transpose() * x_held, corr - x_held.transpose() * v_held,
                           opts.lasso.penalty_weights);
    // Same per-sample penalty on the training subset as on the full data.
    const double factor = static_cast<double>(n - held) / n;
    const auto sols = run_path(solver, fit.lambda_grid, factor, opts.lasso);
    for (int g = 0; g < grid_size; ++g) total[g] += (x_held * sols[g] - v_held).squaredNorm();
  }

  fit.cv_error.resize(grid_size);
  for (int g = 0; g < grid_size; ++g) fit.cv_error[g] = total[g] / n;
  fit.chosen_index = static_cast<int>(std::min_element(total.begin(), total.end()) - total.begin());
  fit.chosen_lambda = fit.lambda_grid[fit.chosen_index];
  fit.coefficients = fit.path.col(fit.chosen_index);
  if (opts.column_scales.size() != 0) fit.coefficients.array() /= opts.column_scales.array();
  return fit;
}

}  // namespace netrecon
