#ifndef TDBM_REGRESSION_HPP
#define TDBM_REGRESSION_HPP

#include <array>

#include "tdbm/mapping.hpp"
#include "tdbm/survey.hpp"

namespace tdbm {

// Per-response least squares with intercept, solved by column-pivoted QR.
// Fills the behavior (6x6) and attention (4x4) matrices; the safety row is
// left zero (see derive_map_set). Requires at least 7 rows; throws
// NumericError naming the deficient columns when the design is
// rank-deficient.
LinearMapSet fit_ols(const SurveyDataset& data);

struct LoocvResult {
  std::array<double, 10> mean_abs_error{};  // native response scale
  size_t fits = 0;                          // one per left-out row
};

// Leave-one-out cross-validation over all ten responses. Requires at least
// 8 rows.
LoocvResult loocv(const SurveyDataset& data);

// fit_ols + PCA of the behavior responses + safety-row composition: the
// complete map set re-derived from survey data.
LinearMapSet derive_map_set(const SurveyDataset& data);

}  // namespace tdbm

#endif  // TDBM_REGRESSION_HPP
