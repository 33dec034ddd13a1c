#include "tdbm/mapping.hpp"

#include "tdbm/errors.hpp"

namespace tdbm {

const std::array<const char*, 6> kBehaviorNames = {"Aggressive", "Reckless", "Threatening",
                                                   "Careful",    "Cautious", "Timid"};
const std::array<const char*, 4> kAttentionNames = {"following", "preceding", "adjacent",
                                                    "far"};

const char* to_string(BehaviorLabel b) {
  if (b == BehaviorLabel::kUndefined) return "Undefined";
  return kBehaviorNames.at(static_cast<size_t>(b));
}

const LinearMapSet& paper_map_set() {
  static const LinearMapSet maps = [] {
    LinearMapSet m;
    m.behavior << 1.63,  4.04, -0.46, -0.82,  0.88, -2.58,
                  1.58,  3.08, -0.45,  0.02, -0.10, -1.67,
                  1.35,  4.08, -0.58, -0.43, -0.28, -1.99,
                 -1.51, -3.17,  1.06,  0.51, -0.51,  1.39,
                 -2.47, -2.60,  1.43,  0.98, -0.82,  1.27,
                 -3.59, -2.19,  1.75,  1.73, -0.30,  0.61;
    m.attention << 0.54,  1.60, 0.11, -0.8,
                  -0.73,  1.66, 0.63, -0.07,
                  -0.14,  1.73, 0.25,  0.15,
                   0.25,  1.47, 0.17, -1.43;
    m.safety << -4.78, -7.89, 2.24, 1.69, -0.83, 4.69;
    return m;
  }();
  return maps;
}

ScoreReport score(const FeatureVector& features, const LinearMapSet& maps) {
  struct Required {
    const char* name;
    std::optional<double> value;
  };
  const Required req[5] = {{"s_center", features.s_center()},
                           {"v_nei", features.v_nei()},
                           {"s_front", features.s_front()},
                           {"v_avg", features.v_avg()},
                           {"j_l", features.j_l()}};
  for (const auto& r : req)
    if (!r.value) throw UsageError(std::string("missing required feature ") + r.name);

  Eigen::Matrix<double, 6, 1> bx;
  bx << *req[0].value, *req[1].value, *req[2].value, *req[3].value, *req[4].value, 1.0;
  Eigen::Matrix<double, 4, 1> ax;
  ax << *req[0].value, *req[1].value, *req[3].value, 1.0;

  Eigen::Matrix<double, 6, 1> b = maps.behavior * bx;
  Eigen::Matrix<double, 4, 1> a = maps.attention * ax;

  ScoreReport out;
  for (int i = 0; i < 6; ++i) out.behaviors[static_cast<size_t>(i)] = b(i);
  for (int i = 0; i < 4; ++i) out.attentions[static_cast<size_t>(i)] = a(i);
  out.s_tdbm = (maps.safety * bx)(0);
  return out;
}

}  // namespace tdbm
