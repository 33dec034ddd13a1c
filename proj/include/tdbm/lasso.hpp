#ifndef TDBM_LASSO_HPP
#define TDBM_LASSO_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tdbm/survey.hpp"

namespace tdbm {

struct LassoSolution {
  double intercept = 0.0;
  Eigen::VectorXd beta;  // one slope per feature column
  size_t sweeps = 0;
};

// L1-penalized least squares for one response: minimizes
// (1/2N)*RSS + lambda*sum|beta_j| by cyclic coordinate descent with
// soft-thresholding. The intercept is unpenalized. Converged when the
// largest coefficient change in a sweep drops below 1e-8. Requires
// normalized survey data (UsageError otherwise).
LassoSolution lasso_fit(const SurveyDataset& data, int response, double lambda,
                        const Eigen::VectorXd* warm_start = nullptr);

// Smallest lambda at which every slope of `response` is zero.
double lasso_lambda_max(const SurveyDataset& data, int response);

// Solutions over a descending log-spaced lambda grid, warm-started, with
// the elimination point of every (response, feature) pair.
struct LassoPath {
  std::vector<std::string> feature_names;
  // per response: descending lambda grid and the matching coefficients
  std::vector<std::vector<double>> lambda_grid;       // [response][grid]
  std::vector<Eigen::MatrixXd> coefficients;          // [response](grid x features)
  // log10 of the smallest grid lambda at which the coefficient is zero and
  // stays zero for all larger grid lambdas
  Eigen::MatrixXd elimination_log10;                  // responses x features
};

LassoPath lasso_path(const SurveyDataset& data, int grid_size = 100,
                     double lambda_min_ratio = 1e-4);

// Thresholds (log10 lambda) at which the published feature sets survive on
// reference-map synthetic data.
constexpr double kDefaultBehaviorThreshold = -2.0;
constexpr double kDefaultAttentionThreshold = -2.0;

struct SelectedFeatures {
  std::vector<std::string> behavior;
  std::vector<std::string> attention;
};

// A feature survives a family threshold when its elimination point in some
// response of that family lies above the threshold. Behavior family =
// responses 0..5, attention family = 6..9.
SelectedFeatures select_features(const LassoPath& path,
                                 double behavior_threshold_log10 = kDefaultBehaviorThreshold,
                                 double attention_threshold_log10 = kDefaultAttentionThreshold);

}  // namespace tdbm

#endif  // TDBM_LASSO_HPP
