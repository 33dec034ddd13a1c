#ifndef TDBM_SURVEY_HPP
#define TDBM_SURVEY_HPP

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace tdbm {

// Canonical survey feature columns, in map input order.
extern const std::array<const char*, 5> kSurveyFeatureColumns;
// Columns of the behavior design that also feed the attention maps
// (s_center, v_nei, v_avg).
extern const std::array<int, 3> kAttentionColumnIdx;

// Rows of normalized features paired with Likert responses: b0..b5 on the
// 7-point grid [-3,3], b6..b9 on the 5-point grid [-2,2], both centered at
// "neither agree or disagree" = 0.
class SurveyDataset {
 public:
  // Programmatic construction (synthetic data may carry continuous
  // responses; only shapes and finiteness are checked).
  SurveyDataset(Eigen::MatrixXd features, Eigen::MatrixXd responses,
                bool normalized = true);

  // CSV with header `s_center,v_nei,s_front,v_avg,j_l,b0,...,b9`.
  // Enforces the integer Likert grids on the response columns.
  static SurveyDataset from_csv(const std::string& path);
  static SurveyDataset from_csv(std::istream& in);

  Eigen::Index rows() const { return features_.rows(); }
  const Eigen::MatrixXd& features() const { return features_; }    // N x 5
  const Eigen::MatrixXd& responses() const { return responses_; }  // N x 10

  // Behavior responses only (b0..b5), N x 6.
  Eigen::MatrixXd behavior_responses() const { return responses_.leftCols(6); }

  // Design matrices with the intercept column of ones appended.
  Eigen::MatrixXd behavior_design() const;   // N x 6
  Eigen::MatrixXd attention_design() const;  // N x 4

  bool normalized() const { return normalized_; }

 private:
  Eigen::MatrixXd features_;
  Eigen::MatrixXd responses_;
  bool normalized_;
};

}  // namespace tdbm

#endif  // TDBM_SURVEY_HPP
