#ifndef TDBM_FEATURES_HPP
#define TDBM_FEATURES_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdbm/trajectory.hpp"

namespace tdbm {

// The ten candidate trajectory features. f0..f3 are undefined when the
// corresponding neighbor class never occurs.
//
//   f0 v_front   average relative speed to the car in front (m/s)
//   f1 v_back    average relative speed to the car behind (m/s)
//   f2 v_left    average relative speed to cars in the left lane (m/s)
//   f3 v_right   average relative speed to cars in the right lane (m/s)
//   f4 v_nei     accumulated distance-weighted speed surplus over neighbors
//   f5 v_avg     average velocity (m/s)
//   f6 s_front   average gap to the front car (m)
//   f7 j_l       lateral jerk magnitude (m/s^3)
//   f8 j_p       along-lane jerk magnitude (m/s^3)
//   f9 s_center  lane following metric (m*s, drift weighted by drift rate)
struct FeatureVector {
  std::array<std::optional<double>, 10> f;

  std::optional<double>& operator[](size_t i) { return f.at(i); }
  const std::optional<double>& operator[](size_t i) const { return f.at(i); }

  // accessors named after the roles used by the score maps
  std::optional<double> s_center() const { return f[9]; }
  std::optional<double> v_nei() const { return f[4]; }
  std::optional<double> s_front() const { return f[6]; }
  std::optional<double> v_avg() const { return f[5]; }
  std::optional<double> j_l() const { return f[7]; }
};

extern const std::array<const char*, 10> kFeatureNames;    // "f0".."f9"
extern const std::array<const char*, 10> kFeatureSymbols;  // "v_front".."s_center"

// Lane-change instants confirmed by a dwell of at least k seconds in the
// new lane. Aborted changes (return before k elapses) never register.
struct LaneChangeEvents {
  std::vector<double> times;  // sorted, s
  double dwell_k = 2.0;       // s
};

struct FeatureParams {
  double dwell_k = 2.0;           // s, lane-change confirmation dwell
  double drift_tau = 1.0;         // s, drift-rate lookback window
  double drift_mu = 0.1;          // floor weight for static offset
  double neighbor_radius = 1609.0;  // m, one-mile neighborhood
  double front_d_max = 100.0;     // m, gap charged when no front car exists
  // Extraction window; defaults to the target's full span.
  std::optional<double> window_begin;
  std::optional<double> window_end;
};

// --- lane geometry derived series -----------------------------------------

// Every instant the nearest-lane assignment switches and then holds for at
// least k seconds. Event time is the switch instant.
LaneChangeEvents detect_lane_changes(const Trajectory& traj, const LaneGeometry& geometry,
                                     double k);

// Unmasked drift y(t) - y_lane(t), one value per sample.
std::vector<double> unmasked_drift(const Trajectory& traj, const LaneGeometry& geometry);

// Drift with every sample within +-k seconds of a confirmed lane change
// zeroed out.
std::vector<double> lane_drift(const Trajectory& traj, const LaneGeometry& geometry,
                               const LaneChangeEvents& events, double k);

// --- the ten features ------------------------------------------------------

// f9: integral of |masked drift| weighted by (mu + trailing tau-window
// integral of |unmasked drift rate|). Composite trapezoid on the uniform
// grid; the trailing window is snapped to whole samples and truncated at the
// trajectory start. Throws ValidationError when the trajectory spans < tau.
double lane_following_metric(const Trajectory& traj, const LaneGeometry& geometry,
                             double k, double tau, double mu);

// f4: integral over time of sum over neighbors within `radius` of
// max(0, (v - v_n) / dist). Throws ValidationError on overlapping vehicles
// (zero distance).
double relative_speed_metric(const TrajectoryLog& log, const std::string& target,
                             double radius);

// (f7 lateral, f8 along-lane): mean absolute third derivative of y and s.
// Finite-difference stencils are exact on cubics, O(dt^2) on smooth input.
// Throws ValidationError with fewer than 4 samples.
std::pair<double, double> jerk_metrics(const Trajectory& traj);

// (f0..f3): per relative-position class, the time-average of v - v_nearest
// over instants where such a neighbor exists; empty when the class never
// occurs.
std::array<std::optional<double>, 4> directional_relative_speeds(
    const TrajectoryLog& log, const std::string& target, double radius);

// (f5, f6): average speed and average front gap; instants without a front
// car charge d_max.
std::pair<double, double> simple_metrics(const TrajectoryLog& log, const std::string& target,
                                         double radius, double d_max);

// All ten features of `target` over the window in `params`.
FeatureVector extract_all(const TrajectoryLog& log, const std::string& target,
                          const FeatureParams& params = {});

// --- percentile normalization ----------------------------------------------

struct FeatureScale {
  double p5 = 0.0;
  double p95 = 1.0;
};

// 5th/95th percentile scaling parameters per feature index.
struct NormalizationParams {
  std::map<int, FeatureScale> scales;
};

// Fits p5/p95 per feature over every vector where the feature is present.
// Requires at least 20 vectors; throws ValidationError when a feature's
// spread is degenerate (p95 == p5).
NormalizationParams fit_normalization(const std::vector<FeatureVector>& vectors);

// x -> (x - p5) / (p95 - p5); values outside [p5, p95] extrapolate linearly.
// Features without fitted scales or absent values pass through unchanged.
FeatureVector normalize(const FeatureVector& v, const NormalizationParams& p);

}  // namespace tdbm

#endif  // TDBM_FEATURES_HPP
