#ifndef TDBM_PLANNER_HPP
#define TDBM_PLANNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "tdbm/geometry.hpp"
#include "tdbm/mapping.hpp"

namespace tdbm {

enum class CostMode { kBaselineExp, kPaperExact, kMonotone };

const char* to_string(CostMode m);
CostMode cost_mode_from_string(const std::string& s);

struct PlannerConfig {
  double horizon = 4.0;         // s
  double dt_plan = 0.2;         // s
  std::vector<int> lane_change_set = {-1, 0, 1};
  std::vector<double> speed_offsets = {-2.0, -1.0, 0.0, 1.0, 2.0};  // m/s
  double w_path = 1.0;
  double w_accel = 0.5;
  double w_lane = 0.3;
  double w_prox = 2.0;
  double d_t = 15.0;            // m, inner proximity threshold
  double d_t2 = 60.0;           // m, outer proximity threshold (no influence beyond)
  double vehicle_length = 4.5;  // m
  double vehicle_width = 1.8;   // m
  double collision_margin = 0.3;  // m, inflation of the ego rectangle per side
  double lateral_blend_time = 3.0;  // s, lane-change completion bound
  double speed_ramp_time = 2.0;     // s, time to reach the speed offset
  double max_brake = 6.0;       // m/s^2, fallback deceleration
  double f_vehicle = 1.0;       // baseline exponential cost factor
  double v_desired = 30.0;      // m/s, route speed
  CostMode cost_mode = CostMode::kMonotone;

  void validate() const;  // 0 < d_t < d_t2 and positive dimensions
};

struct EgoState {
  double t = 0.0;
  double s = 0.0;
  double y = 0.0;
  double v = 0.0;
};

struct CandidateTrajectory {
  int lane_delta = 0;        // -1, 0, +1
  double speed_offset = 0.0;  // m/s
  int target_lane = 0;
  bool feasible = true;
  bool fallback = false;
  std::vector<EgoState> states;  // index 0 is the current state
};

// Straight-line prediction of one neighbor over the horizon.
struct NeighborPrediction {
  std::string vehicle_id;
  double s0 = 0.0;
  double y0 = 0.0;
  double v = 0.0;

  double s_at(double t) const { return s0 + v * t; }
};

// Behavior-aware view of one neighbor, from the score maps.
struct NeighborAssessment {
  std::string vehicle_id;
  double s_tdbm = 0.0;
  // attention scores: [0]=back (neighbor follows ego), [1]=front
  // (neighbor precedes ego), [2]=adjacent, [3]=far
  std::array<double, 4> attention{};
};

// (S_max - s_tdbm)/(S_max - S_min) clamped to [0,1]; 0 = maximally safe.
double danger_from_safety_score(double s_tdbm);

// Neutral assessment used before enough history exists: danger 0.5,
// all attention scores at the scale midpoint.
NeighborAssessment neutral_assessment(const std::string& vehicle_id);

struct CostBreakdown {
  double path_deviation = 0.0;
  double smoothness = 0.0;
  double lane_change = 0.0;
  double proximity = 0.0;
  double total = 0.0;
};

// --- candidate generation and filtering -------------------------------------

// One candidate per (lane delta, speed offset) pair; lane deltas leaving the
// road are skipped. Lateral motion is a cubic blend to the target lane
// center completing within min(horizon, lateral_blend_time); speed ramps
// linearly to the offset within speed_ramp_time, then holds (clamped >= 0).
std::vector<CandidateTrajectory> generate_candidates(const EgoState& ego, int current_lane,
                                                     const LaneGeometry& geometry,
                                                     const PlannerConfig& config);

// In-lane maximal braking, used when no candidate survives the filter.
CandidateTrajectory fallback_brake(const EgoState& ego, int current_lane,
                                   const LaneGeometry& geometry, const PlannerConfig& config);

// Marks candidates infeasible when the ego rectangle (inflated by
// collision_margin per side) overlaps any constant-velocity neighbor
// rectangle at any step.
void collision_filter(std::vector<CandidateTrajectory>& candidates,
                      const std::vector<NeighborPrediction>& neighbors,
                      const PlannerConfig& config);

// Oriented-rectangle overlap test (separating axes), exposed for tests.
struct OrientedRect {
  double cx = 0.0, cy = 0.0;   // center
  double heading = 0.0;        // rad, 0 along +s
  double half_len = 0.0, half_wid = 0.0;
};
bool rects_overlap(const OrientedRect& a, const OrientedRect& b);

// --- proximity costs ---------------------------------------------------------

// Baseline single-class cost: per step, sum over neighbors of
// F_vehicle * exp(-d), averaged over steps.
double proximity_cost_baseline(const CandidateTrajectory& candidate,
                               const std::vector<NeighborPrediction>& neighbors,
                               const PlannerConfig& config);

// Behavior-aware piecewise cost per neighbor and step:
//   0                                                      d >= d_t2
//   W * A_far * (d_t2 - d)/d_t2                            d in (d_t, d_t2]
//   W * [(d_t - d)*(A_r - A_far)/d_t + A_far] * inner_gain  d in (0, d_t]
// PAPER_EXACT: W = s_tdbm, A = raw attention, inner_gain = 1 (keeps the
// published discontinuity at d_t and the safe-is-expensive sign).
// MONOTONE: W = danger(n), A = attention shifted by +2 and clamped at 0
// with A_r >= A_far enforced, inner_gain = (d_t2 - d_t)/d_t2 so the cost is
// continuous at d_t and non-increasing in d.
// d = 0 marks an unfiltered collision: the candidate cost is +infinity.
double proximity_cost_tdbm(const CandidateTrajectory& candidate,
                           const std::vector<NeighborPrediction>& neighbors,
                           const std::vector<NeighborAssessment>& assessments,
                           const LaneGeometry& geometry, const PlannerConfig& config);

// Single neighbor/step kernel, exposed for the cost-contract tests.
// `rel` indexes attention: 0 back, 1 front, 2 adjacent, 3 far.
double piecewise_cost(double distance, int rel, const NeighborAssessment& a,
                      const PlannerConfig& config);

// --- evaluation and selection ------------------------------------------------

CostBreakdown evaluate_candidate(const CandidateTrajectory& candidate, int current_lane,
                                 const LaneGeometry& geometry,
                                 const std::vector<NeighborPrediction>& neighbors,
                                 const std::vector<NeighborAssessment>& assessments,
                                 const PlannerConfig& config);

// Argmin of total cost among feasible candidates; exact ties break toward
// no lane change, then smaller |speed offset|, then lower target lane.
// Returns nullopt when nothing is feasible (caller brakes in-lane).
std::optional<size_t> select_trajectory(const std::vector<CandidateTrajectory>& candidates,
                                        const std::vector<CostBreakdown>& costs);

}  // namespace tdbm

#endif  // TDBM_PLANNER_HPP
