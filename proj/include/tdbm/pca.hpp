#ifndef TDBM_PCA_HPP
#define TDBM_PCA_HPP

#include <Eigen/Dense>
#include <vector>

#include "tdbm/mapping.hpp"
#include "tdbm/survey.hpp"

namespace tdbm {

// Principal components of the six behavior responses.
struct PcaResult {
  // Columns are unit-length component directions, variance-descending;
  // each column's largest-magnitude entry is positive.
  Eigen::Matrix<double, 6, 6> components;
  Eigen::Matrix<double, 6, 1> variance_pct;  // non-increasing, sums to 100
  Eigen::Matrix<double, 6, 1> mean;          // per-response mean
  Eigen::MatrixXd projections;               // N x 6, centered rows in component space
  std::vector<BehaviorLabel> labels;         // per row
};

// Smallest behavior index attaining the row maximum.
int behavior_argmax(const Eigen::Matrix<double, 6, 1>& row);

// Labeling rules: undefined when no rating reaches "Somewhat agree" (+1),
// or when the maximum is shared between a negative adjective (b0..b2) and a
// positive one (b3..b5); otherwise the argmax behavior.
BehaviorLabel label_response(const Eigen::Matrix<double, 6, 1>& row);

// Eigendecomposition of the sample covariance of mean-centered behavior
// responses. Requires at least 6 rows and non-degenerate variance.
PcaResult pca(const SurveyDataset& data);

// Composes PC1 with a fitted behavior matrix into a 1x6 safety row over
// [features, 1]. The PC1 sign is fixed so the carefulness loadings
// (b3..b5) contribute positively.
Eigen::Matrix<double, 1, 6> safety_from_pc1(const PcaResult& p,
                                            const Eigen::Matrix<double, 6, 6>& behavior_map);

}  // namespace tdbm

#endif  // TDBM_PCA_HPP
