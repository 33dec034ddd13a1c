#ifndef TDBM_SIM_HPP
#define TDBM_SIM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdbm/features.hpp"
#include "tdbm/planner.hpp"
#include "tdbm/trajectory.hpp"

namespace tdbm {

enum class PresetKind { kAggressive, kNormal, kCareful, kDrifter };

const char* to_string(PresetKind k);
PresetKind preset_kind_from_string(const std::string& s);

// Car-following / lane-change parameter bundle for background vehicles.
struct BehaviorPreset {
  PresetKind kind = PresetKind::kNormal;
  double desired_speed = 28.0;     // m/s
  double min_spacing = 2.0;        // m
  double time_headway = 1.5;       // s
  double max_accel = 1.4;          // m/s^2
  double comfort_decel = 2.0;      // m/s^2
  double politeness = 0.5;         // [0,1]
  double change_threshold = 0.2;   // m/s^2, lane-change advantage gain
  double drift_amplitude = 0.0;    // m (DRIFTER only)
  double drift_period = 5.0;       // s

  void validate() const;
  static BehaviorPreset make(PresetKind kind);
};

// Equilibrium following gap of the car-following law at speed v behind a
// same-speed leader (bumper to bumper).
double equilibrium_gap(const BehaviorPreset& p, double v);

struct ScenarioVehicle {
  std::string id;
  int lane = 0;
  double s0 = 0.0;   // m
  double v0 = 0.0;   // m/s
  bool is_ego = false;
  BehaviorPreset preset;  // ignored for the ego
};

struct Scenario {
  std::string name = "scenario";
  LaneGeometry geometry = LaneGeometry::uniform(3, 3.7);
  double duration = 30.0;       // s
  double dt = 0.05;             // s
  std::uint64_t seed = 0;
  std::vector<ScenarioVehicle> vehicles;
  PlannerConfig planner;
  double feature_window = 10.0;  // s, trailing window per neighbor
  double warmup_time = 3.0;      // s, neutral assessments before this
  double replan_period = 0.2;    // s
  std::optional<std::string> flagged_id;  // driver of interest for summaries
  std::optional<NormalizationParams> norm;  // default: shipped sim normalization
  double vehicle_length = 4.5;   // m
  double vehicle_width = 1.8;    // m

  void validate() const;  // unique ids, non-overlapping spawns, one ego max
};

// One planning cycle of the ego.
struct PlanRecord {
  double t = 0.0;
  int lane_delta = 0;
  double speed_offset = 0.0;
  int target_lane = 0;
  bool fallback = false;
  CostBreakdown cost;
  double window_begin = 0.0;
  double window_end = 0.0;
  bool warmup = false;
  std::map<std::string, NeighborAssessment> assessments;
  std::map<std::string, FeatureVector> raw_features;  // pre-normalization
};

struct NeighborSummary {
  double min_distance = 0.0;    // m, center to center over the run
  double time_within_dt = 0.0;  // s, inside d_t while assessed danger > 0.5
};

struct SimSummary {
  bool collided = false;
  double collision_time = 0.0;
  std::optional<std::string> flagged_id;
  std::optional<double> min_distance_overall;
  std::optional<double> min_distance_flagged;
  std::map<std::string, NeighborSummary> neighbors;
  int ego_lane_changes = 0;
  std::optional<std::string> final_leader;  // same-lane front neighbor at end
  double avg_ego_speed = 0.0;
};

struct SimTrace {
  std::string scenario_name;
  std::uint64_t seed = 0;
  CostMode cost_mode = CostMode::kMonotone;
  TrajectoryLog log;  // every vehicle at every sim step
  std::vector<PlanRecord> decisions;
  SimSummary summary;
};

// Deterministic fixed-step run: background vehicles follow the
// car-following and lane-change models, the ego replans every
// replan_period with behavior assessments from the trailing window.
// A run that collides stops early with the COLLIDED flag set.
SimTrace run(const Scenario& scenario);

// One run per cost mode with identical seeds.
std::vector<SimTrace> compare(const Scenario& scenario, const std::vector<CostMode>& modes);

// Normalization fitted offline on simulated preset traffic, matching the
// default feature window. Shipped alongside as a JSON asset.
const NormalizationParams& sim_default_normalization();

}  // namespace tdbm

#endif  // TDBM_SIM_HPP
