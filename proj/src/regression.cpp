#include "tdbm/regression.hpp"

#include <string>

#include "tdbm/errors.hpp"
#include "tdbm/pca.hpp"

namespace tdbm {

namespace {

// Least-squares solve with an explicit rank check. Column names are used to
// report which columns are linearly dependent.
Eigen::MatrixXd solve_checked(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets,
                              const std::vector<std::string>& col_names) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < design.cols()) {
    // columns pivoted past the numerical rank are the dependent ones
    const auto& perm = qr.colsPermutation().indices();
    std::string cols;
    for (Eigen::Index k = qr.rank(); k < design.cols(); ++k) {
      if (!cols.empty()) cols += ", ";
      cols += col_names[static_cast<size_t>(perm(k))];
    }
    throw NumericError("rank-deficient design matrix; dependent columns: " + cols);
  }
  return qr.solve(targets);
}

std::vector<std::string> behavior_col_names() {
  std::vector<std::string> names;
  names.reserve(6);
  for (const char* c : kSurveyFeatureColumns) names.emplace_back(c);
  names.emplace_back("intercept");
  return names;
}

std::vector<std::string> attention_col_names() {
  std::vector<std::string> names;
  for (int i : kAttentionColumnIdx)
    names.push_back(kSurveyFeatureColumns[static_cast<size_t>(i)]);
  names.push_back("intercept");
  return names;
}

}  // namespace

LinearMapSet fit_ols(const SurveyDataset& data) {
  if (data.rows() < 7)
    throw UsageError("OLS fit needs at least 7 survey rows");

  Eigen::MatrixXd coef_b = solve_checked(data.behavior_design(),
                                         data.responses().leftCols(6), behavior_col_names());
  Eigen::MatrixXd coef_a = solve_checked(data.attention_design(),
                                         data.responses().rightCols(4), attention_col_names());

  LinearMapSet maps;
  maps.behavior = coef_b.transpose();   // rows = responses, cols = [features, 1]
  maps.attention = coef_a.transpose();
  maps.safety.setZero();
  return maps;
}

LoocvResult loocv(const SurveyDataset& data) {
  const Eigen::Index n = data.rows();
  if (n < 8) throw UsageError("LOOCV needs at least 8 survey rows");

  Eigen::MatrixXd db = data.behavior_design();
  Eigen::MatrixXd da = data.attention_design();
  const Eigen::MatrixXd& y = data.responses();

  LoocvResult out;
  Eigen::MatrixXd db_rest(n - 1, db.cols());
  Eigen::MatrixXd da_rest(n - 1, da.cols());
  Eigen::MatrixXd y_rest(n - 1, 10);
  for (Eigen::Index held = 0; held < n; ++held) {
    Eigen::Index w = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == held) continue;
      db_rest.row(w) = db.row(r);
      da_rest.row(w) = da.row(r);
      y_rest.row(w) = y.row(r);
      ++w;
    }
    Eigen::MatrixXd cb = solve_checked(db_rest, y_rest.leftCols(6), behavior_col_names());
    Eigen::MatrixXd ca = solve_checked(da_rest, y_rest.rightCols(4), attention_col_names());
    ++out.fits;

    Eigen::RowVectorXd pred_b = db.row(held) * cb;
    Eigen::RowVectorXd pred_a = da.row(held) * ca;
    for (int i = 0; i < 6; ++i)
      out.mean_abs_error[static_cast<size_t>(i)] += std::abs(pred_b(i) - y(held, i));
    for (int i = 0; i < 4; ++i)
      out.mean_abs_error[static_cast<size_t>(6 + i)] += std::abs(pred_a(i) - y(held, 6 + i));
  }
  for (auto& e : out.mean_abs_error) e /= static_cast<double>(n);
  return out;
}

LinearMapSet derive_map_set(const SurveyDataset& data) {
  LinearMapSet maps = fit_ols(data);
  PcaResult p = pca(data);
  maps.safety = safety_from_pc1(p, maps.behavior);
  return maps;
}

}  // namespace tdbm
