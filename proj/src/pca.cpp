#include "tdbm/pca.hpp"

#include <cmath>

#include "tdbm/errors.hpp"

namespace tdbm {

int behavior_argmax(const Eigen::Matrix<double, 6, 1>& row) {
  int best = 0;
  for (int i = 1; i < 6; ++i)
    if (row(i) > row(best)) best = i;
  return best;
}

BehaviorLabel label_response(const Eigen::Matrix<double, 6, 1>& row) {
  constexpr double kSomewhatAgree = 1.0;  // 7-point encoding of "Somewhat agree"
  constexpr double kTieEps = 1e-12;

  int arg = behavior_argmax(row);
  double top = row(arg);
  if (top < kSomewhatAgree - kTieEps) return BehaviorLabel::kUndefined;

  bool tie_negative = false;
  bool tie_positive = false;
  for (int i = 0; i < 6; ++i) {
    if (std::abs(row(i) - top) > kTieEps) continue;
    (i < 3 ? tie_negative : tie_positive) = true;
  }
  if (tie_negative && tie_positive) return BehaviorLabel::kUndefined;  // contradiction
  return static_cast<BehaviorLabel>(arg);
}

PcaResult pca(const SurveyDataset& data) {
  const Eigen::Index n = data.rows();
  if (n < 6)
    throw ValidationError("PCA needs at least as many rows as behavior dimensions (6)");

  Eigen::MatrixXd b = data.behavior_responses();
  Eigen::Matrix<double, 6, 1> mean = b.colwise().mean();
  Eigen::MatrixXd centered = b.rowwise() - mean.transpose();
  Eigen::Matrix<double, 6, 6> cov =
      (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(cov);
  if (eig.info() != Eigen::Success)
    throw NumericError("eigendecomposition of the response covariance failed");

  double total = eig.eigenvalues().sum();
  if (!(total > 0.0))
    throw ValidationError("degenerate survey responses: zero total variance");

  PcaResult out;
  out.mean = mean;
  // SelfAdjointEigenSolver sorts ascending; flip to variance-descending.
  for (int c = 0; c < 6; ++c) {
    int src = 5 - c;
    Eigen::Matrix<double, 6, 1> v = eig.eigenvectors().col(src);
    int strongest = 0;
    for (int i = 1; i < 6; ++i)
      if (std::abs(v(i)) > std::abs(v(strongest))) strongest = i;
    if (v(strongest) < 0.0) v = -v;
    out.components.col(c) = v;
    out.variance_pct(c) = 100.0 * eig.eigenvalues()(src) / total;
  }

  out.projections = centered * out.components;
  out.labels.reserve(static_cast<size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r)
    out.labels.push_back(label_response(b.row(r).transpose()));
  return out;
}

Eigen::Matrix<double, 1, 6> safety_from_pc1(const PcaResult& p,
                                            const Eigen::Matrix<double, 6, 6>& behavior_map) {
  Eigen::Matrix<double, 6, 1> pc1 = p.components.col(0);
  // orient toward carefulness: b3..b5 loadings sum positive
  if (pc1(3) + pc1(4) + pc1(5) < 0.0) pc1 = -pc1;
  return pc1.transpose() * behavior_map;
}

}  // namespace tdbm
