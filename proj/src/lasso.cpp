#include "tdbm/lasso.hpp"

#include <cmath>

#include "tdbm/errors.hpp"

namespace tdbm {

namespace {

constexpr double kConvergenceTol = 1e-8;
constexpr size_t kMaxSweeps = 200000;

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

void check_inputs(const SurveyDataset& data, int response, double lambda) {
  if (!data.normalized())
    throw UsageError("lasso requires percentile-normalized survey data");
  if (response < 0 || response >= 10)
    throw UsageError("response index must be in [0, 10)");
  if (lambda < 0.0) throw UsageError("lambda must be >= 0");
  if (data.rows() < 2) throw UsageError("lasso needs at least 2 rows");
}

}  // namespace

LassoSolution lasso_fit(const SurveyDataset& data, int response, double lambda,
                        const Eigen::VectorXd* warm_start) {
  check_inputs(data, response, lambda);

  const Eigen::MatrixXd& x = data.features();
  const Eigen::VectorXd y = data.responses().col(response);
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::VectorXd col_sq(p);  // (1/N) * sum x_ij^2
  for (Eigen::Index j = 0; j < p; ++j) col_sq(j) = x.col(j).squaredNorm() * inv_n;

  LassoSolution sol;
  sol.beta = (warm_start && warm_start->size() == p) ? *warm_start
                                                     : Eigen::VectorXd::Zero(p);
  sol.intercept = (y - x * sol.beta).mean();
  Eigen::VectorXd residual = y - x * sol.beta;
  residual.array() -= sol.intercept;

  for (sol.sweeps = 1; sol.sweeps <= kMaxSweeps; ++sol.sweeps) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq(j) == 0.0) continue;  // constant-zero column carries no signal
      double old = sol.beta(j);
      // partial residual correlation with column j
      double rho = inv_n * x.col(j).dot(residual) + col_sq(j) * old;
      double updated = soft_threshold(rho, lambda) / col_sq(j);
      if (updated != old) {
        residual += x.col(j) * (old - updated);
        sol.beta(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    double mean_r = residual.mean();
    if (mean_r != 0.0) {
      sol.intercept += mean_r;
      residual.array() -= mean_r;
      max_change = std::max(max_change, std::abs(mean_r));
    }
    if (max_change < kConvergenceTol) break;
  }
  return sol;
}

double lasso_lambda_max(const SurveyDataset& data, int response) {
  check_inputs(data, response, 0.0);
  const Eigen::MatrixXd& x = data.features();
  Eigen::VectorXd y = data.responses().col(response);
  y.array() -= y.mean();
  double lmax = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    lmax = std::max(lmax, std::abs(x.col(j).dot(y)) / static_cast<double>(x.rows()));
  return lmax;
}

LassoPath lasso_path(const SurveyDataset& data, int grid_size, double lambda_min_ratio) {
  if (grid_size < 2) throw UsageError("lasso path needs a grid of at least 2 points");
  constexpr int kResponses = 10;

  LassoPath path;
  path.feature_names.assign(kSurveyFeatureColumns.begin(), kSurveyFeatureColumns.end());
  const Eigen::Index p = data.features().cols();
  path.lambda_grid.resize(kResponses);
  path.coefficients.resize(kResponses);
  path.elimination_log10.resize(kResponses, p);

  for (int resp = 0; resp < kResponses; ++resp) {
    double lmax = lasso_lambda_max(data, resp);
    if (lmax <= 0.0)
      throw NumericError("response b" + std::to_string(resp) +
                         " has no correlation with any feature; lambda_max is 0");
    double log_top = std::log10(lmax);
    double log_bot = log_top + std::log10(lambda_min_ratio);

    auto& grid = path.lambda_grid[static_cast<size_t>(resp)];
    grid.resize(static_cast<size_t>(grid_size));
    for (int g = 0; g < grid_size; ++g) {
      double frac = static_cast<double>(g) / static_cast<double>(grid_size - 1);
      grid[static_cast<size_t>(g)] = std::pow(10.0, log_top + frac * (log_bot - log_top));
    }

    Eigen::MatrixXd coefs(grid_size, p);
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(p);
    for (int g = 0; g < grid_size; ++g) {
      LassoSolution sol = lasso_fit(data, resp, grid[static_cast<size_t>(g)], &warm);
      warm = sol.beta;
      coefs.row(g) = sol.beta.transpose();
    }
    path.coefficients[static_cast<size_t>(resp)] = coefs;

    // scan from the top of the grid: the elimination point is the smallest
    // lambda of the leading (largest-lambda) contiguous zero run
    for (Eigen::Index j = 0; j < p; ++j) {
      int last_zero = -1;
      for (int g = 0; g < grid_size; ++g) {
        if (coefs(g, j) == 0.0)
          last_zero = g;
        else
          break;
      }
      // grid point 0 is lambda_max where everything is zero by construction
      int idx = last_zero >= 0 ? last_zero : 0;
      path.elimination_log10(resp, j) = std::log10(grid[static_cast<size_t>(idx)]);
    }
  }
  return path;
}

SelectedFeatures select_features(const LassoPath& path, double behavior_threshold_log10,
                                 double attention_threshold_log10) {
  SelectedFeatures out;
  const Eigen::Index p = path.elimination_log10.cols();
  for (Eigen::Index j = 0; j < p; ++j) {
    double best_b = path.elimination_log10.col(j).head(6).maxCoeff();
    double best_a = path.elimination_log10.col(j).tail(4).maxCoeff();
    if (best_b > behavior_threshold_log10)
      out.behavior.push_back(path.feature_names[static_cast<size_t>(j)]);
    if (best_a > attention_threshold_log10)
      out.attention.push_back(path.feature_names[static_cast<size_t>(j)]);
  }
  return out;
}

}  // namespace tdbm
