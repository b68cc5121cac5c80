#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace netrecon {

/// Minimum-norm least-squares solution via SVD; singular values below
/// 1e-10 * sigma_max are treated as zero.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& v);

double min_singular_value(const Eigen::MatrixXd& theta);

struct LassoOptions {
  double tolerance = 1e-9;      // KKT violation at which descent stops
  int max_sweeps = 100000;
  double kkt_tolerance = 1e-6;  // reported violation above this is an error
  /// Per-column multipliers of lambda; empty means all ones, zero leaves a
  /// column unpenalized.
  Eigen::VectorXd penalty_weights;
  /// Called after every sweep with the current iterate (for diagnostics).
  std::function<void(const Eigen::VectorXd&)> on_sweep;
};

/// ||theta w - v||^2 + lambda sum_j p_j |w_j|, with p the penalty weights
/// (all ones when empty).
double lasso_objective(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v, double lambda,
                       const Eigen::VectorXd& w, const Eigen::VectorXd& weights = {});

/// Largest violation of the optimality conditions
///   |2 t_j^T (theta w - v)| <= lambda p_j            for w_j == 0
///   2 t_j^T (theta w - v) = -lambda p_j sign(w_j)    otherwise.
double kkt_violation(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v, double lambda,
                     const Eigen::VectorXd& w, const Eigen::VectorXd& weights = {});

/// Smallest lambda at which every penalized coefficient vanishes:
/// 2 max_j |t_j^T v| without weights. Unpenalized columns are least-squares
/// fitted first and the maximum runs over the penalized ones.
double lambda_max(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v,
                  const Eigen::VectorXd& weights = {});

/// Cyclic coordinate descent on the penalized objective above, warm-started
/// from w_init (zero when empty). Throws if it fails to converge.
Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v, double lambda,
                         const Eigen::VectorXd& w_init = {}, const LassoOptions& opts = {});

/// Descending logarithmic grid from lambda_max over `decades` orders of magnitude.
std::vector<double> lambda_grid(double lambda_max, int grid_size, double decades);

struct LassoFit {
  std::vector<double> lambda_grid;
  Eigen::MatrixXd path;           // one column per grid value (normalized basis)
  std::vector<double> cv_error;   // mean squared held-out error per grid value
  double chosen_lambda = 0.0;
  int chosen_index = -1;
  Eigen::VectorXd coefficients;   // at chosen lambda, in the unnormalized basis

  std::vector<int> support_sizes() const;
};

/// Warm-started regularization path (cv_error and coefficients left empty).
LassoFit lasso_path(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v, int grid_size = 50,
                    double decades = 4.0, const LassoOptions& opts = {});

struct CrossValidationOptions {
  int folds = 5;
  int grid_size = 50;
  double decades = 4.0;
  /// Factors dividing the normalized coefficients back to the unnormalized
  /// basis; empty means none.
  Eigen::VectorXd column_scales;
  LassoOptions lasso;
};

/// k-fold cross-validation over contiguous time blocks. The chosen lambda
/// minimizes the summed held-out squared error; the returned coefficients come
/// from the full-data path at that lambda.
LassoFit cross_validate(const Eigen::MatrixXd& theta, const Eigen::VectorXd& v,
                        const CrossValidationOptions& opts = {});

}  // namespace netrecon
