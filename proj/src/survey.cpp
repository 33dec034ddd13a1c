#include "tdbm/survey.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "tdbm/errors.hpp"

namespace tdbm {

const std::array<const char*, 5> kSurveyFeatureColumns = {"s_center", "v_nei", "s_front",
                                                          "v_avg", "j_l"};
const std::array<int, 3> kAttentionColumnIdx = {0, 1, 3};

SurveyDataset::SurveyDataset(Eigen::MatrixXd features, Eigen::MatrixXd responses,
                             bool normalized)
    : features_(std::move(features)), responses_(std::move(responses)),
      normalized_(normalized) {
  if (features_.cols() != 5)
    throw ValidationError("survey features must have 5 columns");
  if (responses_.cols() != 10)
    throw ValidationError("survey responses must have 10 columns");
  if (features_.rows() != responses_.rows())
    throw ValidationError("survey feature/response row counts differ");
  if (!features_.allFinite() || !responses_.allFinite())
    throw ValidationError("survey data contains non-finite values");
}

namespace {

constexpr const char* kSurveyHeader = "s_center,v_nei,s_front,v_avg,j_l,b0,b1,b2,b3,b4,b5,b6,b7,b8,b9";

double likert_checked(double v, int response_idx, size_t line_no) {
  double limit = response_idx < 6 ? 3.0 : 2.0;
  if (std::abs(v - std::round(v)) > 1e-9 || std::abs(v) > limit + 1e-9)
    throw ValidationError("line " + std::to_string(line_no) + ": response b" +
                          std::to_string(response_idx) + " off the Likert grid: " +
                          std::to_string(v));
  return std::round(v);
}

}  // namespace

SurveyDataset SurveyDataset::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty survey file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSurveyHeader)
    throw ParseError(std::string("bad survey header, expected '") + kSurveyHeader + "'");

  std::vector<std::array<double, 15>> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 15> row{};
    std::stringstream ss(line);
    std::string field;
    for (int i = 0; i < 15; ++i) {
      if (!std::getline(ss, field, ','))
        throw ParseError("line " + std::to_string(line_no) + ": expected 15 fields");
      try {
        row[static_cast<size_t>(i)] = std::stod(field);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + field + "'");
      }
    }
    if (std::getline(ss, field, ','))
      throw ParseError("line " + std::to_string(line_no) + ": expected 15 fields");
    for (int i = 0; i < 10; ++i)
      row[static_cast<size_t>(5 + i)] = likert_checked(row[static_cast<size_t>(5 + i)], i, line_no);
    rows.push_back(row);
  }

  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), 5);
  Eigen::MatrixXd Y(static_cast<Eigen::Index>(rows.size()), 10);
  for (size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < 5; ++c) X(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<size_t>(c)];
    for (int c = 0; c < 10; ++c) Y(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<size_t>(5 + c)];
  }
  return SurveyDataset(std::move(X), std::move(Y), /*normalized=*/true);
}

SurveyDataset SurveyDataset::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open survey file: " + path);
  return from_csv(in);
}

Eigen::MatrixXd SurveyDataset::behavior_design() const {
  Eigen::MatrixXd d(features_.rows(), 6);
  d.leftCols(5) = features_;
  d.col(5).setOnes();
  return d;
}

Eigen::MatrixXd SurveyDataset::attention_design() const {
  Eigen::MatrixXd d(features_.rows(), 4);
  for (int i = 0; i < 3; ++i) d.col(i) = features_.col(kAttentionColumnIdx[static_cast<size_t>(i)]);
  d.col(3).setOnes();
  return d;
}

}  // namespace tdbm
