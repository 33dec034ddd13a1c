#ifndef TDBM_MAPPING_HPP
#define TDBM_MAPPING_HPP

#include <Eigen/Dense>
#include <array>
#include <string>

#include "tdbm/features.hpp"

namespace tdbm {

// Behavior metric semantics (7-point scale responses b0..b5).
enum class BehaviorLabel {
  kAggressive = 0,
  kReckless = 1,
  kThreatening = 2,
  kCareful = 3,
  kCautious = 4,
  kTimid = 5,
  kUndefined = 6,
};

const char* to_string(BehaviorLabel b);

extern const std::array<const char*, 6> kBehaviorNames;   // b0..b5
extern const std::array<const char*, 4> kAttentionNames;  // b6..b9: back/front/adj/far

// Linear maps from normalized features to scores.
//   behavior:  6x6 applied to [s_center, v_nei, s_front, v_avg, j_l, 1]
//   attention: 4x4 applied to [s_center, v_nei, v_avg, 1]
//              rows ordered (B_back, B_front, B_adj, B_far) = (b6..b9)
//   safety:    1x6 row applied to the behavior input vector
struct LinearMapSet {
  Eigen::Matrix<double, 6, 6> behavior;
  Eigen::Matrix<double, 4, 4> attention;
  Eigen::Matrix<double, 1, 6> safety;
};

// The published map set.
const LinearMapSet& paper_map_set();

// Extrema of the published safety row over the normalized feature
// hypercube [0,1]^5 (sign-wise summation of the coefficients).
constexpr double kSafetyScoreMax = 8.62;
constexpr double kSafetyScoreMin = -8.81;

// Six behavior scores, four attention scores, and the scalar safety score.
struct ScoreReport {
  std::array<double, 6> behaviors{};
  std::array<double, 4> attentions{};
  double s_tdbm = 0.0;
};

// Three matrix-vector products over the normalized features. Scores are
// continuous (no clamping to the Likert grids). Throws UsageError naming
// the first missing required feature (s_center, v_nei, s_front, v_avg, j_l).
ScoreReport score(const FeatureVector& features, const LinearMapSet& maps);

}  // namespace tdbm

#endif  // TDBM_MAPPING_HPP
