#include "tdbm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "tdbm/errors.hpp"
#include "tdbm/mapping.hpp"

namespace tdbm {

namespace {

constexpr double kLaneChangeDuration = 3.0;  // s, background lateral blend
constexpr double kLaneDecisionPeriod = 0.5;  // s
constexpr double kLaneChangeCooldown = 5.0;  // s
constexpr double kSafeBrake = 4.0;           // m/s^2, MOBIL safety bound
constexpr double kHardBrake = 9.0;           // m/s^2, physical deceleration cap
constexpr double kSpeedJitter = 0.02;        // fraction of v0, seeded

}  // namespace

const char* to_string(PresetKind k) {
  switch (k) {
    case PresetKind::kAggressive: return "aggressive";
    case PresetKind::kNormal: return "normal";
    case PresetKind::kCareful: return "careful";
    case PresetKind::kDrifter: return "drifter";
  }
  return "?";
}

PresetKind preset_kind_from_string(const std::string& s) {
  if (s == "aggressive") return PresetKind::kAggressive;
  if (s == "normal") return PresetKind::kNormal;
  if (s == "careful") return PresetKind::kCareful;
  if (s == "drifter") return PresetKind::kDrifter;
  throw UsageError("unknown behavior preset '" + s + "'");
}

void BehaviorPreset::validate() const {
  if (desired_speed <= 0.0 || min_spacing <= 0.0 || time_headway <= 0.0 ||
      max_accel <= 0.0 || comfort_decel <= 0.0 || change_threshold <= 0.0)
    throw ValidationError("behavior preset parameters must be positive");
  if (politeness < 0.0 || politeness > 1.0)
    throw ValidationError("politeness must lie in [0, 1]");
  if (drift_amplitude < 0.0 || drift_period <= 0.0)
    throw ValidationError("drift parameters out of range");
}

BehaviorPreset BehaviorPreset::make(PresetKind kind) {
  BehaviorPreset p;  // NORMAL defaults
  p.kind = kind;
  switch (kind) {
    case PresetKind::kNormal:
      break;
    case PresetKind::kAggressive:
      // half the headway, stronger pedals, little regard for others
      p.desired_speed = 33.0;
      p.time_headway = 0.75;
      p.min_spacing = 1.0;
      p.max_accel = 2.8;
      p.comfort_decel = 4.0;
      p.politeness = 0.1;
      p.change_threshold = 0.1;
      break;
    case PresetKind::kCareful:
      // double the headway, gentle pedals
      p.desired_speed = 25.0;
      p.time_headway = 3.0;
      p.min_spacing = 3.0;
      p.max_accel = 1.0;
      p.comfort_decel = 1.5;
      p.politeness = 0.9;
      p.change_threshold = 0.4;
      break;
    case PresetKind::kDrifter:
      p.desired_speed = 30.0;
      p.time_headway = 0.9;
      p.min_spacing = 1.5;
      p.max_accel = 2.2;
      p.comfort_decel = 3.0;
      p.politeness = 0.2;
      p.change_threshold = 0.15;
      p.drift_amplitude = 1.0;
      p.drift_period = 5.0;
      break;
  }
  return p;
}

double equilibrium_gap(const BehaviorPreset& p, double v) {
  double free_ratio = std::pow(v / p.desired_speed, 4.0);
  if (free_ratio >= 1.0)
    throw UsageError("no equilibrium at or above the desired speed");
  double s_star = p.min_spacing + v * p.time_headway;
  return s_star / std::sqrt(1.0 - free_ratio);
}

void Scenario::validate() const {
  if (duration <= 0.0 || dt <= 0.0)
    throw ValidationError("scenario needs positive duration and dt");
  if (duration < 2.0 * dt) throw ValidationError("scenario too short to record");
  if (replan_period < dt)
    throw ValidationError("replan period must be at least one sim step");
  planner.validate();

  std::set<std::string> ids;
  int egos = 0;
  for (const auto& v : vehicles) {
    if (v.id.empty()) throw ValidationError("vehicle with empty id");
    if (!ids.insert(v.id).second) throw ValidationError("duplicate vehicle id " + v.id);
    if (!geometry.contains_lane(v.lane))
      throw ValidationError("vehicle " + v.id + " spawns outside the road");
    if (v.is_ego)
      ++egos;
    else
      v.preset.validate();
  }
  if (egos > 1) throw ValidationError("at most one ego vehicle");

  // no two initial rectangles may overlap
  for (size_t i = 0; i < vehicles.size(); ++i) {
    for (size_t j = i + 1; j < vehicles.size(); ++j) {
      if (vehicles[i].lane != vehicles[j].lane) continue;
      if (std::abs(vehicles[i].s0 - vehicles[j].s0) < vehicle_length)
        throw ValidationError("vehicles " + vehicles[i].id + " and " + vehicles[j].id +
                              " spawn overlapping");
    }
  }
  if (flagged_id) {
    bool found = false;
    for (const auto& v : vehicles) found = found || v.id == *flagged_id;
    if (!found) throw ValidationError("flagged vehicle " + *flagged_id + " not in scenario");
  }
}

namespace {

struct LaneChangeState {
  int target = 0;
  double t_start = 0.0;
  double y_start = 0.0;
};

struct Agent {
  ScenarioVehicle cfg;
  double s = 0.0;
  double v = 0.0;
  double y = 0.0;
  double y_base = 0.0;  // lateral position without drift
  int lane = 0;         // committed lane
  std::optional<LaneChangeState> change;
  double cooldown_until = 0.0;
  double drift_phase = 0.0;  // s
  std::vector<VehicleSample> history;
};

// car-following acceleration toward an optional leader given as (gap, speed)
double idm_accel_gap(const BehaviorPreset& p, double v, std::optional<double> gap,
                     double leader_v) {
  double free_term = 1.0 - std::pow(std::max(0.0, v) / p.desired_speed, 4.0);
  double acc = p.max_accel * free_term;
  if (gap) {
    double g = std::max(*gap, 0.1);
    double closing = v - leader_v;
    double s_star = p.min_spacing +
                    std::max(0.0, v * p.time_headway +
                                      v * closing /
                                          (2.0 * std::sqrt(p.max_accel * p.comfort_decel)));
    acc -= p.max_accel * (s_star / g) * (s_star / g);
  }
  return std::clamp(acc, -kHardBrake, p.max_accel);
}

struct Snapshot {
  double s, v, y;
  int lane;  // interaction lane: nearest center to y
};

int interaction_lane(const LaneGeometry& g, double y) { return g.nearest_lane(y); }

// nearest leader/follower of `self` in `lane`, by snapshot index
std::optional<size_t> find_leader(const std::vector<Snapshot>& snap, size_t self, int lane) {
  std::optional<size_t> best;
  for (size_t i = 0; i < snap.size(); ++i) {
    if (i == self || snap[i].lane != lane) continue;
    if (snap[i].s <= snap[self].s) continue;
    if (!best || snap[i].s < snap[*best].s) best = i;
  }
  return best;
}

std::optional<size_t> find_follower(const std::vector<Snapshot>& snap, size_t self,
                                    int lane) {
  std::optional<size_t> best;
  for (size_t i = 0; i < snap.size(); ++i) {
    if (i == self || snap[i].lane != lane) continue;
    if (snap[i].s > snap[self].s) continue;
    if (!best || snap[i].s > snap[*best].s) best = i;
  }
  return best;
}

}  // namespace

const NormalizationParams& sim_default_normalization() {
  // Fitted offline on simulated preset traffic (assets/scenarios/
  // norm_corpus.json, 10 s windows); kept in sync with assets/sim_norm.json.
  static const NormalizationParams params = [] {
    NormalizationParams p;
    p.scales[0] = {-2.2406379694427776, 6.399999999999999};   // f0 v_front
    p.scales[1] = {-6.3999999999999995, 2.2406379694427687};  // f1 v_back
    p.scales[2] = {-5.086717038717673, 4.357142857142854};    // f2 v_left
    p.scales[3] = {-4.3571428571428505, 5.086717038717679};   // f3 v_right
    p.scales[4] = {0.001852279157407701, 2.885396217563542};  // f4 v_nei
    p.scales[5] = {20.345774873052917, 31.950000000000003};   // f5 v_avg
    p.scales[6] = {13.458040403327453, 100.0};                // f6 s_front
    p.scales[7] = {0.0032202738892676584, 1.7657368639004943};  // f7 j_l
    p.scales[8] = {0.009578295532699518, 1.3212350778340054};   // f8 j_p
    p.scales[9] = {0.0006034879898687283, 3.0576238780860145};  // f9 s_center
    return p;
  }();
  return params;
}

namespace {

struct EgoRuntime {
  size_t agent_idx = 0;
  int ref_lane = 0;
  std::vector<EgoState> plan;  // absolute times
  double next_replan = 0.0;
};

EgoState interp_plan(const std::vector<EgoState>& plan, double t) {
  if (plan.empty()) throw NumericError("ego has no active plan");
  if (t <= plan.front().t) return plan.front();
  if (t >= plan.back().t) {
    // extrapolate at constant speed past the horizon (replan should occur first)
    EgoState st = plan.back();
    double dt = t - st.t;
    st.s += st.v * dt;
    st.t = t;
    return st;
  }
  for (size_t i = 1; i < plan.size(); ++i) {
    if (t <= plan[i].t + 1e-12) {
      const EgoState& a = plan[i - 1];
      const EgoState& b = plan[i];
      double u = (t - a.t) / (b.t - a.t);
      EgoState st;
      st.t = t;
      st.s = a.s + u * (b.s - a.s);
      st.y = a.y + u * (b.y - a.y);
      st.v = a.v + u * (b.v - a.v);
      return st;
    }
  }
  return plan.back();
}

}  // namespace

SimTrace run(const Scenario& scenario) {
  scenario.validate();
  const LaneGeometry& geom = scenario.geometry;
  const double dt = scenario.dt;
  const size_t steps = static_cast<size_t>(std::llround(scenario.duration / dt));

  std::mt19937_64 rng(scenario.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> uni01(0.0, 1.0);

  std::vector<Agent> agents;
  std::optional<EgoRuntime> ego;
  for (const auto& cfg : scenario.vehicles) {
    Agent a;
    a.cfg = cfg;
    a.s = cfg.s0;
    a.v = cfg.v0;
    a.lane = cfg.lane;
    a.y_base = geom.center_of(cfg.lane);
    a.y = a.y_base;
    if (!cfg.is_ego) {
      a.v = cfg.v0 * (1.0 + kSpeedJitter * uni(rng));
      if (cfg.preset.drift_amplitude > 0.0)
        a.drift_phase = uni01(rng) * cfg.preset.drift_period;
    }
    if (cfg.is_ego) {
      ego = EgoRuntime{};
      ego->agent_idx = agents.size();
      ego->ref_lane = cfg.lane;
    }
    a.history.push_back({0.0, a.s, a.y, a.v, geom.nearest_lane(a.y)});
    agents.push_back(std::move(a));
  }

  SimTrace trace{scenario.name, scenario.seed, scenario.planner.cost_mode,
                 TrajectoryLog(geom, {}), {}, {}};
  std::map<std::string, NeighborSummary> nb_summary;
  std::map<std::string, double> latest_danger;
  for (const auto& a : agents)
    if (!a.cfg.is_ego) nb_summary[a.cfg.id] = {std::numeric_limits<double>::max(), 0.0};

  const FeatureParams feature_params;  // shared with the normalization corpus
  const NormalizationParams& norm =
      scenario.norm ? *scenario.norm : sim_default_normalization();

  double ego_speed_acc = 0.0;
  size_t ego_speed_n = 0;

  for (size_t step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    // --- ego replanning ------------------------------------------------
    if (ego && t + 1e-9 >= ego->next_replan) {
      Agent& e = agents[ego->agent_idx];
      bool warmup = t < scenario.warmup_time;
      double win0 = std::max(0.0, t - scenario.feature_window);

      PlanRecord rec;
      rec.t = t;
      rec.warmup = warmup;
      rec.window_begin = win0;
      rec.window_end = t;

      std::vector<NeighborAssessment> assessments;
      if (warmup) {
        for (const auto& a : agents)
          if (!a.cfg.is_ego) assessments.push_back(neutral_assessment(a.cfg.id));
      } else {
        // score every neighbor over the trailing window
        std::vector<Trajectory> trajs;
        for (const auto& a : agents) {
          std::vector<VehicleSample> win;
          for (const auto& smp : a.history)
            if (smp.t >= win0 - 1e-9) win.push_back(smp);
          trajs.emplace_back(a.cfg.id, std::move(win), dt);
        }
        TrajectoryLog window_log(geom, std::move(trajs));
        for (const auto& a : agents) {
          if (a.cfg.is_ego) continue;
          FeatureVector raw = extract_all(window_log, a.cfg.id, feature_params);
          ScoreReport sr = score(normalize(raw, norm), paper_map_set());
          NeighborAssessment na;
          na.vehicle_id = a.cfg.id;
          na.s_tdbm = sr.s_tdbm;
          na.attention = sr.attentions;
          assessments.push_back(na);
          rec.raw_features[a.cfg.id] = raw;
        }
      }
      for (const auto& na : assessments) {
        rec.assessments[na.vehicle_id] = na;
        latest_danger[na.vehicle_id] = danger_from_safety_score(na.s_tdbm);
      }

      std::vector<NeighborPrediction> predictions;
      for (const auto& a : agents)
        if (!a.cfg.is_ego) predictions.push_back({a.cfg.id, a.s, a.y, a.v});

      EgoState now{t, e.s, e.y, e.v};
      auto candidates = generate_candidates(now, ego->ref_lane, geom, scenario.planner);
      collision_filter(candidates, predictions, scenario.planner);
      std::vector<CostBreakdown> costs(candidates.size());
      for (size_t i = 0; i < candidates.size(); ++i)
        costs[i] = evaluate_candidate(candidates[i], ego->ref_lane, geom, predictions,
                                      assessments, scenario.planner);
      auto pick = select_trajectory(candidates, costs);

      CandidateTrajectory chosen;
      if (pick) {
        chosen = candidates[*pick];
        rec.cost = costs[*pick];
      } else {
        chosen = fallback_brake(now, ego->ref_lane, geom, scenario.planner);
        rec.cost = {};
      }
      rec.lane_delta = chosen.lane_delta;
      rec.speed_offset = chosen.speed_offset;
      rec.target_lane = chosen.target_lane;
      rec.fallback = chosen.fallback;
      if (chosen.lane_delta != 0) {
        ego->ref_lane = chosen.target_lane;
        ++trace.summary.ego_lane_changes;
      }
      ego->plan = chosen.states;
      ego->next_replan = t + scenario.replan_period;
      trace.decisions.push_back(std::move(rec));
    }

    // --- background lane-change decisions -------------------------------
    const size_t decision_every =
        std::max<size_t>(1, static_cast<size_t>(std::llround(kLaneDecisionPeriod / dt)));
    bool decision_tick = step % decision_every == 0;
    std::vector<Snapshot> snap(agents.size());
    for (size_t i = 0; i < agents.size(); ++i)
      snap[i] = {agents[i].s, agents[i].v, agents[i].y, interaction_lane(geom, agents[i].y)};

    if (decision_tick) {
      for (size_t i = 0; i < agents.size(); ++i) {
        Agent& a = agents[i];
        if (a.cfg.is_ego || a.change || t < a.cooldown_until) continue;
        const BehaviorPreset& p = a.cfg.preset;

        auto gap_to = [&](std::optional<size_t> other) -> std::optional<double> {
          if (!other) return std::nullopt;
          return snap[*other].s - a.s - scenario.vehicle_length;
        };
        auto old_leader = find_leader(snap, i, snap[i].lane);
        double acc_now = idm_accel_gap(p, a.v, gap_to(old_leader),
                                       old_leader ? snap[*old_leader].v : 0.0);

        int best_target = 0;
        double best_incentive = p.change_threshold;
        for (int dl : {-1, 1}) {
          int target = snap[i].lane + dl;
          if (!geom.contains_lane(target)) continue;
          auto new_leader = find_leader(snap, i, target);
          auto new_follower = find_follower(snap, i, target);

          double acc_new = idm_accel_gap(p, a.v, gap_to(new_leader),
                                         new_leader ? snap[*new_leader].v : 0.0);
          if (acc_new < -kSafeBrake) continue;

          // the ego is judged with NORMAL parameters in politeness terms
          auto preset_of = [&](size_t idx) -> const BehaviorPreset& {
            static const BehaviorPreset ego_proxy = BehaviorPreset::make(PresetKind::kNormal);
            return agents[idx].cfg.is_ego ? ego_proxy : agents[idx].cfg.preset;
          };

          double follower_terms = 0.0;
          if (new_follower) {
            const BehaviorPreset& nfp = preset_of(*new_follower);
            double nf_v = snap[*new_follower].v;
            std::optional<double> nf_gap_now;
            double nf_leader_v_now = 0.0;
            if (auto l = find_leader(snap, *new_follower, target); l) {
              nf_gap_now = snap[*l].s - snap[*new_follower].s - scenario.vehicle_length;
              nf_leader_v_now = snap[*l].v;
            }
            double nf_acc_now = idm_accel_gap(nfp, nf_v, nf_gap_now, nf_leader_v_now);
            double nf_gap_then = a.s - snap[*new_follower].s - scenario.vehicle_length;
            double nf_acc_then = idm_accel_gap(nfp, nf_v, nf_gap_then, a.v);
            if (nf_acc_then < -kSafeBrake) continue;  // unsafe for the follower
            follower_terms += nf_acc_then - nf_acc_now;
          }
          if (auto of = find_follower(snap, i, snap[i].lane); of) {
            const BehaviorPreset& ofp = preset_of(*of);
            double of_gap_now = a.s - snap[*of].s - scenario.vehicle_length;
            double of_acc_now = idm_accel_gap(ofp, snap[*of].v, of_gap_now, a.v);
            std::optional<double> of_gap_then;
            if (old_leader)
              of_gap_then = snap[*old_leader].s - snap[*of].s - scenario.vehicle_length;
            double of_acc_then = idm_accel_gap(ofp, snap[*of].v, of_gap_then,
                                               old_leader ? snap[*old_leader].v : 0.0);
            follower_terms += of_acc_then - of_acc_now;
          }

          double incentive = acc_new - acc_now + p.politeness * follower_terms;
          if (incentive > best_incentive) {
            best_incentive = incentive;
            best_target = dl;
          }
        }
        if (best_target != 0) {
          a.change = LaneChangeState{snap[i].lane + best_target, t, a.y_base};
          a.lane = snap[i].lane + best_target;
          a.cooldown_until = t + kLaneChangeCooldown;
        }
      }
    }

    // --- integrate one step ---------------------------------------------
    const double t_next = static_cast<double>(step + 1) * dt;
    for (size_t i = 0; i < agents.size(); ++i) {
      Agent& a = agents[i];
      if (a.cfg.is_ego) continue;
      auto leader = find_leader(snap, i, snap[i].lane);
      // during a change, also respect the leader in the target lane
      std::optional<double> gap;
      double leader_v = 0.0;
      if (leader) {
        gap = snap[*leader].s - a.s - scenario.vehicle_length;
        leader_v = snap[*leader].v;
      }
      if (a.change) {
        auto tl = find_leader(snap, i, a.change->target);
        if (tl) {
          double tgap = snap[*tl].s - a.s - scenario.vehicle_length;
          if (!gap || tgap < *gap) {
            gap = tgap;
            leader_v = snap[*tl].v;
          }
        }
      }
      double acc = idm_accel_gap(a.cfg.preset, a.v, gap, leader_v);
      a.v = std::max(0.0, a.v + acc * dt);
      a.s += a.v * dt;

      if (a.change) {
        double u = (t_next - a.change->t_start) / kLaneChangeDuration;
        if (u >= 1.0) {
          a.y_base = geom.center_of(a.change->target);
          a.change.reset();
        } else {
          double yt = geom.center_of(a.change->target);
          a.y_base = a.change->y_start +
                     (yt - a.change->y_start) * (3.0 * u * u - 2.0 * u * u * u);
        }
      }
      a.y = a.y_base;
      if (a.cfg.preset.drift_amplitude > 0.0)
        a.y += a.cfg.preset.drift_amplitude *
               std::sin(2.0 * M_PI * (t_next + a.drift_phase) / a.cfg.preset.drift_period);
    }
    if (ego) {
      Agent& e = agents[ego->agent_idx];
      EgoState st = interp_plan(ego->plan, t_next);
      e.s = st.s;
      e.y = st.y;
      e.v = st.v;
      ego_speed_acc += e.v;
      ++ego_speed_n;
    }

    for (auto& a : agents)
      a.history.push_back({t_next, a.s, a.y, a.v, geom.nearest_lane(a.y)});

    // --- collision check and summary accumulation -----------------------
    if (ego) {
      const Agent& e = agents[ego->agent_idx];
      bool collided = false;
      for (const auto& a : agents) {
        if (a.cfg.is_ego) continue;
        double d = std::hypot(a.s - e.s, a.y - e.y);
        auto& ns = nb_summary[a.cfg.id];
        ns.min_distance = std::min(ns.min_distance, d);
        auto it = latest_danger.find(a.cfg.id);
        if (d <= scenario.planner.d_t && it != latest_danger.end() && it->second > 0.5)
          ns.time_within_dt += dt;
        OrientedRect ego_rect{e.s, e.y, 0.0, 0.5 * scenario.vehicle_length,
                              0.5 * scenario.vehicle_width};
        OrientedRect nb_rect{a.s, a.y, 0.0, 0.5 * scenario.vehicle_length,
                             0.5 * scenario.vehicle_width};
        if (rects_overlap(ego_rect, nb_rect)) collided = true;
      }
      if (collided) {
        trace.summary.collided = true;
        trace.summary.collision_time = t_next;
        break;
      }
    }
  }

  // --- finalize ----------------------------------------------------------
  std::vector<Trajectory> trajs;
  for (auto& a : agents) trajs.emplace_back(a.cfg.id, std::move(a.history), dt);
  trace.log = TrajectoryLog(geom, std::move(trajs));

  if (ego) trace.summary.neighbors = std::move(nb_summary);
  if (ego) {
    const Agent& e = agents[ego->agent_idx];
    double overall = std::numeric_limits<double>::max();
    for (const auto& [id, ns] : trace.summary.neighbors)
      overall = std::min(overall, ns.min_distance);
    if (!trace.summary.neighbors.empty()) trace.summary.min_distance_overall = overall;
    if (scenario.flagged_id) {
      trace.summary.flagged_id = scenario.flagged_id;
      auto it = trace.summary.neighbors.find(*scenario.flagged_id);
      if (it != trace.summary.neighbors.end())
        trace.summary.min_distance_flagged = it->second.min_distance;
    }
    if (ego_speed_n > 0)
      trace.summary.avg_ego_speed = ego_speed_acc / static_cast<double>(ego_speed_n);

    int ego_lane = geom.nearest_lane(e.y);
    std::optional<size_t> leader;
    for (size_t i = 0; i < agents.size(); ++i) {
      const Agent& a = agents[i];
      if (a.cfg.is_ego || geom.nearest_lane(a.y) != ego_lane || a.s <= e.s) continue;
      if (!leader || a.s < agents[*leader].s) leader = i;
    }
    if (leader) trace.summary.final_leader = agents[*leader].cfg.id;
  }
  return trace;
}

std::vector<SimTrace> compare(const Scenario& scenario, const std::vector<CostMode>& modes) {
  std::vector<SimTrace> out;
  for (CostMode m : modes) {
    Scenario s = scenario;
    s.planner.cost_mode = m;
    out.push_back(run(s));
  }
  return out;
}

}  // namespace tdbm
