#include "tdbm/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "tdbm/errors.hpp"

namespace tdbm {

Trajectory::Trajectory(std::string vehicle_id, std::vector<VehicleSample> samples,
                       double dt)
    : vehicle_id_(std::move(vehicle_id)), samples_(std::move(samples)), dt_(dt) {
  if (dt_ <= 0.0) throw ValidationError("trajectory dt must be > 0");
  if (samples_.size() < 3)
    throw ValidationError("trajectory " + vehicle_id_ + " needs at least 3 samples");
  for (size_t i = 0; i + 1 < samples_.size(); ++i) {
    if (samples_[i + 1].t <= samples_[i].t)
      throw ValidationError("trajectory " + vehicle_id_ +
                            " has non-monotone sample times");
  }
}

VehicleState Trajectory::state_at(double t, const LaneGeometry& geometry) const {
  if (!alive_at(t))
    throw ValidationError("vehicle " + vehicle_id_ + " not alive at queried time");
  VehicleState st;
  const auto& ss = samples_;
  if (t <= ss.front().t) {
    st = {ss.front().s, ss.front().y, ss.front().v, 0};
  } else if (t >= ss.back().t) {
    st = {ss.back().s, ss.back().y, ss.back().v, 0};
  } else {
    // find first sample with time > t
    auto it = std::upper_bound(ss.begin(), ss.end(), t,
                               [](double tv, const VehicleSample& smp) { return tv < smp.t; });
    const VehicleSample& b = *it;
    const VehicleSample& a = *(it - 1);
    double u = (t - a.t) / (b.t - a.t);
    if (std::abs(t - a.t) < 1e-12) u = 0.0;  // exact grid hit
    st.s = a.s + u * (b.s - a.s);
    st.y = a.y + u * (b.y - a.y);
    st.v = a.v + u * (b.v - a.v);
  }
  st.lane = geometry.nearest_lane(st.y);
  return st;
}

Trajectory Trajectory::slice(double t0, double t1) const {
  std::vector<VehicleSample> out;
  for (const auto& smp : samples_)
    if (smp.t >= t0 - 1e-9 && smp.t <= t1 + 1e-9) out.push_back(smp);
  if (out.size() < 3)
    throw ValidationError("window leaves fewer than 3 samples of vehicle " + vehicle_id_);
  return Trajectory(vehicle_id_, std::move(out), dt_);
}

const char* to_string(RelPos p) {
  switch (p) {
    case RelPos::kFront: return "FRONT";
    case RelPos::kBack: return "BACK";
    case RelPos::kLeft: return "LEFT";
    case RelPos::kRight: return "RIGHT";
    case RelPos::kFar: return "FAR";
  }
  return "?";
}

RelPos classify_neighbor(int target_lane, int neighbor_lane, double delta_s) {
  int dl = neighbor_lane - target_lane;
  if (dl == 0) return delta_s >= 0.0 ? RelPos::kFront : RelPos::kBack;
  if (dl == 1) return RelPos::kLeft;
  if (dl == -1) return RelPos::kRight;
  return RelPos::kFar;
}

TrajectoryLog::TrajectoryLog(LaneGeometry geometry, std::vector<Trajectory> trajectories,
                             IngestStats stats)
    : geometry_(std::move(geometry)), stats_(stats) {
  bool first = true;
  for (auto& traj : trajectories) {
    if (trajectories_.count(traj.vehicle_id()))
      throw ValidationError("duplicate vehicle id " + traj.vehicle_id());
    if (first) {
      t_begin_ = traj.t_begin();
      t_end_ = traj.t_end();
      first = false;
    } else {
      t_begin_ = std::min(t_begin_, traj.t_begin());
      t_end_ = std::max(t_end_, traj.t_end());
    }
    std::string id = traj.vehicle_id();
    trajectories_.emplace(std::move(id), std::move(traj));
  }
}

const Trajectory& TrajectoryLog::trajectory(const std::string& id) const {
  auto it = trajectories_.find(id);
  if (it == trajectories_.end()) throw ValidationError("unknown vehicle " + id);
  return it->second;
}

std::vector<Neighbor> TrajectoryLog::neighbor_query(const std::string& target, double t,
                                                    double radius) const {
  const Trajectory& tgt = trajectory(target);
  if (!tgt.alive_at(t))
    throw ValidationError("vehicle " + target + " not alive at queried time");
  VehicleState ts = tgt.state_at(t, geometry_);

  std::vector<Neighbor> out;
  for (const auto& [id, traj] : trajectories_) {
    if (id == target || !traj.alive_at(t)) continue;
    VehicleState ns = traj.state_at(t, geometry_);
    double ds = ns.s - ts.s;
    double dy = ns.y - ts.y;
    double dist = std::hypot(ds, dy);
    if (dist > radius) continue;
    Neighbor nb;
    nb.vehicle_id = id;
    nb.rel = classify_neighbor(ts.lane, ns.lane, ds);
    nb.distance = dist;
    nb.delta_s = ds;
    nb.state = ns;
    out.push_back(std::move(nb));
  }
  return out;
}

}  // namespace tdbm
