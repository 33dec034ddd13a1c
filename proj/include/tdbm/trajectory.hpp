#ifndef TDBM_TRAJECTORY_HPP
#define TDBM_TRAJECTORY_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tdbm/geometry.hpp"

namespace tdbm {

// One kinematic sample on the shared clock. s is the along-lane position,
// y the lateral position, v the along-lane speed.
struct VehicleSample {
  double t = 0.0;   // s
  double s = 0.0;   // m
  double y = 0.0;   // m
  double v = 0.0;   // m/s
  std::optional<int> lane_id;  // nearest lane center; empty when unknown
};

// Interpolated state of a vehicle at an arbitrary time.
struct VehicleState {
  double s = 0.0;
  double y = 0.0;
  double v = 0.0;
  int lane = 0;
};

// Uniformly sampled track of a single vehicle. Samples are strictly
// increasing in t with nominal period dt; at least 3 samples.
class Trajectory {
 public:
  Trajectory(std::string vehicle_id, std::vector<VehicleSample> samples, double dt);

  const std::string& vehicle_id() const { return vehicle_id_; }
  const std::vector<VehicleSample>& samples() const { return samples_; }
  double dt() const { return dt_; }
  size_t size() const { return samples_.size(); }

  double t_begin() const { return samples_.front().t; }
  double t_end() const { return samples_.back().t; }
  double span() const { return t_end() - t_begin(); }

  bool alive_at(double t) const {
    return t >= t_begin() - 1e-9 && t <= t_end() + 1e-9;
  }

  // Linear interpolation between samples; exact on the grid.
  // Lane is the nearest center to the interpolated y.
  VehicleState state_at(double t, const LaneGeometry& geometry) const;

  // Sub-trajectory covering samples with t in [t0, t1] (small tolerance on
  // the bounds). Throws ValidationError when fewer than 3 samples remain.
  Trajectory slice(double t0, double t1) const;

 private:
  std::string vehicle_id_;
  std::vector<VehicleSample> samples_;
  double dt_;
};

// Relative position of a neighbor with respect to a target vehicle.
// LEFT is the adjacent lane at larger y, RIGHT at smaller y.
enum class RelPos { kFront, kBack, kLeft, kRight, kFar };

const char* to_string(RelPos p);

struct Neighbor {
  std::string vehicle_id;
  RelPos rel = RelPos::kFar;
  double distance = 0.0;   // Euclidean in the (s, y) plane, m
  double delta_s = 0.0;    // neighbor.s - target.s, m
  VehicleState state;
};

struct IngestStats {
  size_t rows = 0;
  size_t dropped_short = 0;  // trajectories with fewer than 3 samples
};

// Immutable multi-vehicle log over a shared clock.
class TrajectoryLog {
 public:
  TrajectoryLog(LaneGeometry geometry, std::vector<Trajectory> trajectories,
                IngestStats stats = {});

  const LaneGeometry& geometry() const { return geometry_; }
  const std::map<std::string, Trajectory>& trajectories() const { return trajectories_; }
  const IngestStats& stats() const { return stats_; }

  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }
  size_t vehicle_count() const { return trajectories_.size(); }

  bool has_vehicle(const std::string& id) const { return trajectories_.count(id) > 0; }
  const Trajectory& trajectory(const std::string& id) const;

  // Every other vehicle alive at t within `radius` of the target, classified
  // by lane offset and sign of delta-s. Throws ValidationError when the
  // target is unknown or not alive at t.
  std::vector<Neighbor> neighbor_query(const std::string& target, double t,
                                       double radius) const;

 private:
  LaneGeometry geometry_;
  std::map<std::string, Trajectory> trajectories_;
  IngestStats stats_;
  double t_begin_ = 0.0;
  double t_end_ = 0.0;
};

// Classification used by neighbor_query, exposed for table-driven tests:
// same lane -> FRONT/BACK by sign of delta_s (ties ahead), adjacent lane ->
// LEFT/RIGHT, anything else -> FAR.
RelPos classify_neighbor(int target_lane, int neighbor_lane, double delta_s);

}  // namespace tdbm

#endif  // TDBM_TRAJECTORY_HPP
