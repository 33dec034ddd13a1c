#include "tdbm/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "tdbm/errors.hpp"

namespace tdbm {

const char* to_string(CostMode m) {
  switch (m) {
    case CostMode::kBaselineExp: return "baseline-exp";
    case CostMode::kPaperExact: return "paper-exact";
    case CostMode::kMonotone: return "monotone";
  }
  return "?";
}

CostMode cost_mode_from_string(const std::string& s) {
  if (s == "baseline-exp") return CostMode::kBaselineExp;
  if (s == "paper-exact") return CostMode::kPaperExact;
  if (s == "monotone") return CostMode::kMonotone;
  throw UsageError("unknown cost mode '" + s +
                   "' (expected baseline-exp, paper-exact or monotone)");
}

void PlannerConfig::validate() const {
  if (!(d_t > 0.0 && d_t < d_t2))
    throw ValidationError("planner thresholds must satisfy 0 < d_t < d_t2");
  if (horizon <= 0.0 || dt_plan <= 0.0 || dt_plan > horizon)
    throw ValidationError("planner needs 0 < dt_plan <= horizon");
  if (vehicle_length <= 0.0 || vehicle_width <= 0.0)
    throw ValidationError("vehicle dimensions must be positive");
  if (w_path < 0.0 || w_accel < 0.0 || w_lane < 0.0 || w_prox < 0.0)
    throw ValidationError("cost weights must be non-negative");
}

double danger_from_safety_score(double s_tdbm) {
  double d = (kSafetyScoreMax - s_tdbm) / (kSafetyScoreMax - kSafetyScoreMin);
  return std::clamp(d, 0.0, 1.0);
}

NeighborAssessment neutral_assessment(const std::string& vehicle_id) {
  NeighborAssessment a;
  a.vehicle_id = vehicle_id;
  a.s_tdbm = 0.5 * (kSafetyScoreMax + kSafetyScoreMin);  // danger 0.5
  a.attention = {0.0, 0.0, 0.0, 0.0};                    // scale midpoint
  return a;
}

namespace {

size_t horizon_steps(const PlannerConfig& config) {
  return static_cast<size_t>(std::llround(config.horizon / config.dt_plan));
}

std::vector<EgoState> roll_states(const EgoState& ego, double y_target, double v_target,
                                  double ramp_time, double blend_time,
                                  const PlannerConfig& config) {
  size_t n = horizon_steps(config);
  std::vector<EgoState> states(n + 1);
  double rate = ramp_time > 0.0 ? (v_target - ego.v) / ramp_time : 0.0;
  for (size_t i = 0; i <= n; ++i) {
    double t = static_cast<double>(i) * config.dt_plan;
    EgoState st;
    st.t = ego.t + t;
    if (ramp_time > 0.0 && t < ramp_time) {
      st.v = ego.v + rate * t;
      st.s = ego.s + ego.v * t + 0.5 * rate * t * t;
    } else {
      st.v = v_target;
      st.s = ego.s + ego.v * ramp_time + 0.5 * rate * ramp_time * ramp_time +
             v_target * (t - ramp_time);
    }
    double u = blend_time > 0.0 ? std::min(1.0, t / blend_time) : 1.0;
    st.y = ego.y + (y_target - ego.y) * (3.0 * u * u - 2.0 * u * u * u);
    states[i] = st;
  }
  return states;
}

}  // namespace

std::vector<CandidateTrajectory> generate_candidates(const EgoState& ego, int current_lane,
                                                     const LaneGeometry& geometry,
                                                     const PlannerConfig& config) {
  config.validate();
  double blend = std::min(config.horizon, config.lateral_blend_time);
  std::vector<CandidateTrajectory> out;
  for (int delta : config.lane_change_set) {
    int target = current_lane + delta;
    if (!geometry.contains_lane(target)) continue;
    for (double offset : config.speed_offsets) {
      CandidateTrajectory cand;
      cand.lane_delta = delta;
      cand.speed_offset = offset;
      cand.target_lane = target;
      double v_target = std::max(0.0, ego.v + offset);
      cand.states = roll_states(ego, geometry.center_of(target), v_target,
                                config.speed_ramp_time, blend, config);
      out.push_back(std::move(cand));
    }
  }
  return out;
}

CandidateTrajectory fallback_brake(const EgoState& ego, int current_lane,
                                   const LaneGeometry& geometry, const PlannerConfig& config) {
  (void)geometry;
  (void)current_lane;
  size_t n = horizon_steps(config);
  CandidateTrajectory cand;
  cand.lane_delta = 0;
  cand.speed_offset = -ego.v;
  cand.target_lane = current_lane;
  cand.fallback = true;
  cand.states.resize(n + 1);
  double t_stop = config.max_brake > 0.0 ? ego.v / config.max_brake : 0.0;
  for (size_t i = 0; i <= n; ++i) {
    double t = static_cast<double>(i) * config.dt_plan;
    EgoState st;
    st.t = ego.t + t;
    st.y = ego.y;
    if (t < t_stop) {
      st.v = ego.v - config.max_brake * t;
      st.s = ego.s + ego.v * t - 0.5 * config.max_brake * t * t;
    } else {
      st.v = 0.0;
      st.s = ego.s + 0.5 * ego.v * t_stop;
    }
    cand.states[i] = st;
  }
  return cand;
}

bool rects_overlap(const OrientedRect& a, const OrientedRect& b) {
  // separating-axis test over both rectangles' edge normals
  const OrientedRect* rects[2] = {&a, &b};
  for (const OrientedRect* r : rects) {
    double axes[2] = {r->heading, r->heading + M_PI / 2.0};
    for (double axis : axes) {
      double ux = std::cos(axis);
      double uy = std::sin(axis);
      auto project = [&](const OrientedRect& rc, double& lo, double& hi) {
        double c = rc.cx * ux + rc.cy * uy;
        double ca = std::cos(rc.heading);
        double sa = std::sin(rc.heading);
        // extent of the rotated box along (ux, uy)
        double ext = std::abs((ca * ux + sa * uy) * rc.half_len) +
                     std::abs((-sa * ux + ca * uy) * rc.half_wid);
        lo = c - ext;
        hi = c + ext;
      };
      double alo, ahi, blo, bhi;
      project(a, alo, ahi);
      project(b, blo, bhi);
      if (ahi < blo || bhi < alo) return false;  // separating axis found
    }
  }
  return true;
}

void collision_filter(std::vector<CandidateTrajectory>& candidates,
                      const std::vector<NeighborPrediction>& neighbors,
                      const PlannerConfig& config) {
  double ego_hl = 0.5 * config.vehicle_length + config.collision_margin;
  double ego_hw = 0.5 * config.vehicle_width + config.collision_margin;
  double nb_hl = 0.5 * config.vehicle_length;
  double nb_hw = 0.5 * config.vehicle_width;

  // sub-stepped so that relative motion between checks stays well below the
  // rectangle overlap window (40 m/s closing x 0.05 s = 2 m)
  constexpr double kCheckDt = 0.05;
  int substeps = std::max(1, static_cast<int>(std::ceil(config.dt_plan / kCheckDt)));

  for (auto& cand : candidates) {
    for (size_t i = 1; i < cand.states.size() && cand.feasible; ++i) {
      const EgoState& cur = cand.states[i];
      const EgoState& prev = cand.states[i - 1];
      double dx = cur.s - prev.s;
      double dy = cur.y - prev.y;
      double heading = (std::abs(dx) + std::abs(dy)) > 1e-9 ? std::atan2(dy, dx) : 0.0;
      for (int k = 1; k <= substeps && cand.feasible; ++k) {
        double u = static_cast<double>(k) / substeps;
        double es = prev.s + u * dx;
        double ey = prev.y + u * dy;
        double t = prev.t + u * (cur.t - prev.t) - cand.states[0].t;
        OrientedRect ego{es, ey, heading, ego_hl, ego_hw};
        for (const auto& nb : neighbors) {
          OrientedRect other{nb.s_at(t), nb.y0, 0.0, nb_hl, nb_hw};
          if (rects_overlap(ego, other)) {
            cand.feasible = false;
            break;
          }
        }
      }
    }
  }
}

double proximity_cost_baseline(const CandidateTrajectory& candidate,
                               const std::vector<NeighborPrediction>& neighbors,
                               const PlannerConfig& config) {
  if (candidate.states.size() < 2) return 0.0;
  double acc = 0.0;
  size_t steps = candidate.states.size() - 1;
  for (size_t i = 1; i <= steps; ++i) {
    const EgoState& st = candidate.states[i];
    double t = st.t - candidate.states[0].t;
    for (const auto& nb : neighbors) {
      double d = std::hypot(nb.s_at(t) - st.s, nb.y0 - st.y);
      acc += config.f_vehicle * std::exp(-d);
    }
  }
  return acc / static_cast<double>(steps);
}

double piecewise_cost(double distance, int rel, const NeighborAssessment& a,
                      const PlannerConfig& config) {
  if (distance >= config.d_t2) return 0.0;

  double w, att_far, att_rel, inner_gain;
  if (config.cost_mode == CostMode::kPaperExact) {
    w = a.s_tdbm;
    att_far = a.attention[3];
    att_rel = a.attention[static_cast<size_t>(rel)];
    inner_gain = 1.0;
  } else {
    // MONOTONE: weight by danger, shift attention into [0,4] (clamped at 0,
    // near >= far) and rescale the inner branch for continuity at d_t
    w = danger_from_safety_score(a.s_tdbm);
    att_far = std::max(0.0, a.attention[3] + 2.0);
    att_rel = std::max(att_far, std::max(0.0, a.attention[static_cast<size_t>(rel)] + 2.0));
    inner_gain = (config.d_t2 - config.d_t) / config.d_t2;
  }

  if (distance > config.d_t)
    return w * att_far * (config.d_t2 - distance) / config.d_t2;
  return w * ((config.d_t - distance) * (att_rel - att_far) / config.d_t + att_far) *
         inner_gain;
}

namespace {

// attention slot of a neighbor relative to the ego: 0 back, 1 front,
// 2 adjacent, 3 far
int relative_slot(const LaneGeometry& geometry, double ego_s, double ego_y, double nb_s,
                  double nb_y) {
  int dl = geometry.nearest_lane(nb_y) - geometry.nearest_lane(ego_y);
  if (dl == 0) return nb_s >= ego_s ? 1 : 0;
  if (dl == 1 || dl == -1) return 2;
  return 3;
}

}  // namespace

double proximity_cost_tdbm(const CandidateTrajectory& candidate,
                           const std::vector<NeighborPrediction>& neighbors,
                           const std::vector<NeighborAssessment>& assessments,
                           const LaneGeometry& geometry, const PlannerConfig& config) {
  if (candidate.states.size() < 2) return 0.0;
  std::map<std::string, const NeighborAssessment*> by_id;
  for (const auto& a : assessments) by_id[a.vehicle_id] = &a;

  double acc = 0.0;
  size_t steps = candidate.states.size() - 1;
  for (size_t i = 1; i <= steps; ++i) {
    const EgoState& st = candidate.states[i];
    double t = st.t - candidate.states[0].t;
    for (const auto& nb : neighbors) {
      auto it = by_id.find(nb.vehicle_id);
      const NeighborAssessment* a = it != by_id.end() ? it->second : nullptr;
      double ds = nb.s_at(t) - st.s;
      double dy = nb.y0 - st.y;
      double d = std::hypot(ds, dy);
      if (d < 1e-9) return std::numeric_limits<double>::infinity();
      if (!a) continue;  // unassessed neighbors carry no behavior cost
      int rel = relative_slot(geometry, st.s, st.y, nb.s_at(t), nb.y0);
      acc += piecewise_cost(d, rel, *a, config);
    }
  }
  return acc / static_cast<double>(steps);
}

CostBreakdown evaluate_candidate(const CandidateTrajectory& candidate, int current_lane,
                                 const LaneGeometry& geometry,
                                 const std::vector<NeighborPrediction>& neighbors,
                                 const std::vector<NeighborAssessment>& assessments,
                                 const PlannerConfig& config) {
  CostBreakdown c;
  size_t n = candidate.states.size();
  if (n < 2) return c;
  size_t steps = n - 1;
  double dt = config.dt_plan;

  // route tracking: lateral offset from the reference lane plus speed error
  double y_ref = geometry.center_of(current_lane);
  double lat_acc = 0.0;
  double v_acc = 0.0;
  for (size_t i = 1; i < n; ++i) {
    lat_acc += std::abs(candidate.states[i].y - y_ref) / geometry.lane_width();
    v_acc += candidate.states[i].v;
  }
  double v_mean = v_acc / static_cast<double>(steps);
  c.path_deviation = lat_acc / static_cast<double>(steps) +
                     std::abs(v_mean - config.v_desired) / std::max(1.0, config.v_desired);

  double long_acc = 0.0;
  for (size_t i = 1; i < n; ++i)
    long_acc += std::abs(candidate.states[i].v - candidate.states[i - 1].v) / dt;
  double lat_jerk = 0.0;
  for (size_t i = 1; i + 1 < n; ++i)
    lat_jerk += std::abs(candidate.states[i + 1].y - 2.0 * candidate.states[i].y +
                         candidate.states[i - 1].y) / (dt * dt);
  c.smoothness = long_acc / static_cast<double>(steps) +
                 (n > 2 ? lat_jerk / static_cast<double>(n - 2) : 0.0);

  c.lane_change = candidate.lane_delta != 0 ? 1.0 : 0.0;

  if (config.cost_mode == CostMode::kBaselineExp)
    c.proximity = proximity_cost_baseline(candidate, neighbors, config);
  else
    c.proximity = proximity_cost_tdbm(candidate, neighbors, assessments, geometry, config);

  c.total = config.w_path * c.path_deviation + config.w_accel * c.smoothness +
            config.w_lane * c.lane_change + config.w_prox * c.proximity;
  return c;
}

std::optional<size_t> select_trajectory(const std::vector<CandidateTrajectory>& candidates,
                                        const std::vector<CostBreakdown>& costs) {
  if (candidates.size() != costs.size())
    throw UsageError("candidate/cost count mismatch");
  std::optional<size_t> best;
  auto key = [&](size_t i) {
    return std::make_tuple(costs[i].total, candidates[i].lane_delta != 0 ? 1 : 0,
                           std::abs(candidates[i].speed_offset), candidates[i].target_lane);
  };
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].feasible) continue;
    if (std::isinf(costs[i].total)) continue;
    if (!best || key(i) < key(*best)) best = i;
  }
  return best;
}

}  // namespace tdbm
