#include "tdbm/io_json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tdbm/errors.hpp"

namespace tdbm {

namespace {

void fail_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ParseError("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

Json feature_vector_to_json(const FeatureVector& v) {
  Json j;
  for (size_t i = 0; i < 10; ++i) {
    if (v[i])
      j[kFeatureNames[i]] = *v[i];
    else
      j[kFeatureNames[i]] = nullptr;
  }
  return j;
}

FeatureVector feature_vector_from_json(const Json& j) {
  FeatureVector v;
  for (size_t i = 0; i < 10; ++i) {
    const char* key = kFeatureNames[i];
    if (j.contains(key) && !j.at(key).is_null()) v[i] = j.at(key).get<double>();
  }
  return v;
}

Json normalization_to_json(const NormalizationParams& p) {
  Json j;
  for (const auto& [idx, sc] : p.scales) {
    Json e;
    e["p5"] = sc.p5;
    e["p95"] = sc.p95;
    j[kFeatureNames[static_cast<size_t>(idx)]] = e;
  }
  return j;
}

NormalizationParams normalization_from_json(const Json& j) {
  NormalizationParams p;
  for (size_t i = 0; i < 10; ++i) {
    const char* key = kFeatureNames[i];
    if (!j.contains(key)) continue;
    FeatureScale sc;
    sc.p5 = j.at(key).at("p5").get<double>();
    sc.p95 = j.at(key).at("p95").get<double>();
    if (!(sc.p95 > sc.p5))
      throw ValidationError(std::string("normalization for ") + key + " has p95 <= p5");
    p.scales[static_cast<int>(i)] = sc;
  }
  if (p.scales.empty()) throw ParseError("normalization file defines no feature scales");
  return p;
}

NormalizationParams load_normalization(const std::string& path) {
  return normalization_from_json(read_json_file(path));
}

namespace {

template <int R, int C>
Json matrix_to_json(const Eigen::Matrix<double, R, C>& m) {
  Json rows = Json::array();
  for (int r = 0; r < R; ++r) {
    Json row = Json::array();
    for (int c = 0; c < C; ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

template <int R, int C>
Eigen::Matrix<double, R, C> matrix_from_json(const Json& j, const char* name) {
  if (!j.is_array() || j.size() != R)
    throw ParseError(std::string(name) + " must be a " + std::to_string(R) + "-row array");
  Eigen::Matrix<double, R, C> m;
  for (int r = 0; r < R; ++r) {
    const Json& row = j.at(static_cast<size_t>(r));
    if (!row.is_array() || row.size() != C)
      throw ParseError(std::string(name) + " row " + std::to_string(r) + " must have " +
                       std::to_string(C) + " entries");
    for (int c = 0; c < C; ++c) m(r, c) = row.at(static_cast<size_t>(c)).get<double>();
  }
  return m;
}

}  // namespace

Json map_set_to_json(const LinearMapSet& maps) {
  Json j;
  j["behavior"] = matrix_to_json<6, 6>(maps.behavior);
  j["attention"] = matrix_to_json<4, 4>(maps.attention);
  Json safety = Json::array();
  for (int c = 0; c < 6; ++c) safety.push_back(maps.safety(0, c));
  j["safety"] = safety;
  return j;
}

LinearMapSet map_set_from_json(const Json& j) {
  LinearMapSet maps;
  maps.behavior = matrix_from_json<6, 6>(j.at("behavior"), "behavior");
  maps.attention = matrix_from_json<4, 4>(j.at("attention"), "attention");
  const Json& s = j.at("safety");
  if (!s.is_array() || s.size() != 6) throw ParseError("safety must have 6 entries");
  for (int c = 0; c < 6; ++c) maps.safety(0, c) = s.at(static_cast<size_t>(c)).get<double>();
  return maps;
}

LinearMapSet load_map_set(const std::string& path) {
  return map_set_from_json(read_json_file(path));
}

Json score_report_to_json(const ScoreReport& r) {
  Json j;
  Json behaviors = Json::array();
  for (double b : r.behaviors) behaviors.push_back(b);
  Json attentions = Json::array();
  for (double a : r.attentions) attentions.push_back(a);
  j["behaviors"] = behaviors;
  j["attentions"] = attentions;
  j["s_tdbm"] = r.s_tdbm;
  return j;
}

Json pca_result_to_json(const PcaResult& p) {
  Json j;
  j["components"] = matrix_to_json<6, 6>(p.components);
  Json var = Json::array();
  for (int i = 0; i < 6; ++i) var.push_back(p.variance_pct(i));
  j["variance_pct"] = var;
  Json mean = Json::array();
  for (int i = 0; i < 6; ++i) mean.push_back(p.mean(i));
  j["mean"] = mean;
  Json labels = Json::array();
  for (auto l : p.labels) labels.push_back(to_string(l));
  j["labels"] = labels;
  Json proj = Json::array();
  for (Eigen::Index r = 0; r < p.projections.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < 6; ++c) row.push_back(p.projections(r, c));
    proj.push_back(row);
  }
  j["projections"] = proj;
  return j;
}

namespace {

PlannerConfig planner_from_json(const Json& j, PlannerConfig base) {
  fail_unknown_keys(j,
                    {"horizon", "dt_plan", "lane_change_set", "speed_offsets", "w_path",
                     "w_accel", "w_lane", "w_prox", "d_t", "d_t2", "vehicle_length",
                     "vehicle_width", "collision_margin", "lateral_blend_time",
                     "speed_ramp_time", "max_brake", "f_vehicle", "v_desired", "cost_mode"},
                    "planner config");
  base.horizon = get_or(j, "horizon", base.horizon);
  base.dt_plan = get_or(j, "dt_plan", base.dt_plan);
  base.lane_change_set = get_or(j, "lane_change_set", base.lane_change_set);
  base.speed_offsets = get_or(j, "speed_offsets", base.speed_offsets);
  base.w_path = get_or(j, "w_path", base.w_path);
  base.w_accel = get_or(j, "w_accel", base.w_accel);
  base.w_lane = get_or(j, "w_lane", base.w_lane);
  base.w_prox = get_or(j, "w_prox", base.w_prox);
  base.d_t = get_or(j, "d_t", base.d_t);
  base.d_t2 = get_or(j, "d_t2", base.d_t2);
  base.vehicle_length = get_or(j, "vehicle_length", base.vehicle_length);
  base.vehicle_width = get_or(j, "vehicle_width", base.vehicle_width);
  base.collision_margin = get_or(j, "collision_margin", base.collision_margin);
  base.lateral_blend_time = get_or(j, "lateral_blend_time", base.lateral_blend_time);
  base.speed_ramp_time = get_or(j, "speed_ramp_time", base.speed_ramp_time);
  base.max_brake = get_or(j, "max_brake", base.max_brake);
  base.f_vehicle = get_or(j, "f_vehicle", base.f_vehicle);
  base.v_desired = get_or(j, "v_desired", base.v_desired);
  if (j.contains("cost_mode"))
    base.cost_mode = cost_mode_from_string(j.at("cost_mode").get<std::string>());
  return base;
}

BehaviorPreset preset_from_json(const std::string& name, const Json* overrides) {
  BehaviorPreset p = BehaviorPreset::make(preset_kind_from_string(name));
  if (overrides) {
    fail_unknown_keys(*overrides,
                      {"desired_speed", "min_spacing", "time_headway", "max_accel",
                       "comfort_decel", "politeness", "change_threshold",
                       "drift_amplitude", "drift_period"},
                      "preset overrides");
    p.desired_speed = get_or(*overrides, "desired_speed", p.desired_speed);
    p.min_spacing = get_or(*overrides, "min_spacing", p.min_spacing);
    p.time_headway = get_or(*overrides, "time_headway", p.time_headway);
    p.max_accel = get_or(*overrides, "max_accel", p.max_accel);
    p.comfort_decel = get_or(*overrides, "comfort_decel", p.comfort_decel);
    p.politeness = get_or(*overrides, "politeness", p.politeness);
    p.change_threshold = get_or(*overrides, "change_threshold", p.change_threshold);
    p.drift_amplitude = get_or(*overrides, "drift_amplitude", p.drift_amplitude);
    p.drift_period = get_or(*overrides, "drift_period", p.drift_period);
  }
  return p;
}

}  // namespace

Scenario scenario_from_json(const Json& j, const std::string& base_dir) {
  fail_unknown_keys(j,
                    {"name", "duration", "dt", "seed", "geometry", "vehicles", "planner",
                     "cost_mode", "feature_window", "warmup_time", "replan_period",
                     "flagged_id", "norm_file", "vehicle_length", "vehicle_width"},
                    "scenario");
  Scenario sc;
  sc.name = get_or<std::string>(j, "name", "scenario");
  sc.duration = j.at("duration").get<double>();
  sc.dt = get_or(j, "dt", sc.dt);
  sc.seed = get_or<std::uint64_t>(j, "seed", 0);

  const Json& g = j.at("geometry");
  fail_unknown_keys(g, {"lane_count", "lane_width", "y0"}, "geometry");
  sc.geometry = LaneGeometry::uniform(g.at("lane_count").get<int>(),
                                      g.at("lane_width").get<double>(),
                                      get_or(g, "y0", 0.0));

  sc.vehicle_length = get_or(j, "vehicle_length", sc.vehicle_length);
  sc.vehicle_width = get_or(j, "vehicle_width", sc.vehicle_width);

  for (const Json& vj : j.at("vehicles")) {
    fail_unknown_keys(vj, {"id", "lane", "s0", "v0", "preset", "overrides"}, "vehicle");
    ScenarioVehicle v;
    v.id = vj.at("id").get<std::string>();
    v.lane = vj.at("lane").get<int>();
    v.s0 = vj.at("s0").get<double>();
    v.v0 = vj.at("v0").get<double>();
    std::string preset = vj.at("preset").get<std::string>();
    if (preset == "ego") {
      v.is_ego = true;
    } else {
      const Json* ov = vj.contains("overrides") ? &vj.at("overrides") : nullptr;
      v.preset = preset_from_json(preset, ov);
    }
    sc.vehicles.push_back(std::move(v));
  }

  PlannerConfig planner;
  planner.vehicle_length = sc.vehicle_length;
  planner.vehicle_width = sc.vehicle_width;
  if (j.contains("planner")) planner = planner_from_json(j.at("planner"), planner);
  if (j.contains("cost_mode"))
    planner.cost_mode = cost_mode_from_string(j.at("cost_mode").get<std::string>());
  sc.planner = planner;

  sc.feature_window = get_or(j, "feature_window", sc.feature_window);
  sc.warmup_time = get_or(j, "warmup_time", sc.warmup_time);
  sc.replan_period = get_or(j, "replan_period", sc.replan_period);
  if (j.contains("flagged_id") && !j.at("flagged_id").is_null())
    sc.flagged_id = j.at("flagged_id").get<std::string>();
  if (j.contains("norm_file") && !j.at("norm_file").is_null()) {
    std::filesystem::path p(j.at("norm_file").get<std::string>());
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    sc.norm = load_normalization(p.string());
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  Json j = read_json_file(path);
  return scenario_from_json(j, std::filesystem::path(path).parent_path().string());
}

Json trace_to_json(const SimTrace& trace) {
  Json j;
  j["scenario"] = trace.scenario_name;
  j["seed"] = trace.seed;
  j["cost_mode"] = to_string(trace.cost_mode);

  Json summary;
  summary["collided"] = trace.summary.collided;
  if (trace.summary.collided) summary["collision_time"] = trace.summary.collision_time;
  summary["min_distance"] = trace.summary.min_distance_overall
                                ? Json(*trace.summary.min_distance_overall)
                                : Json(nullptr);
  summary["flagged_id"] =
      trace.summary.flagged_id ? Json(*trace.summary.flagged_id) : Json(nullptr);
  summary["min_distance_flagged"] = trace.summary.min_distance_flagged
                                        ? Json(*trace.summary.min_distance_flagged)
                                        : Json(nullptr);
  summary["ego_lane_changes"] = trace.summary.ego_lane_changes;
  summary["final_leader"] =
      trace.summary.final_leader ? Json(*trace.summary.final_leader) : Json(nullptr);
  summary["avg_ego_speed"] = trace.summary.avg_ego_speed;
  Json nbs;
  for (const auto& [id, ns] : trace.summary.neighbors) {
    Json e;
    e["min_distance"] = ns.min_distance;
    e["time_within_dt"] = ns.time_within_dt;
    nbs[id] = e;
  }
  summary["neighbors"] = nbs;
  j["summary"] = summary;

  Json decisions = Json::array();
  for (const auto& d : trace.decisions) {
    Json e;
    e["t"] = d.t;
    e["lane_delta"] = d.lane_delta;
    e["speed_offset"] = d.speed_offset;
    e["target_lane"] = d.target_lane;
    e["fallback"] = d.fallback;
    e["warmup"] = d.warmup;
    e["window"] = Json::array({d.window_begin, d.window_end});
    Json cost;
    cost["path_deviation"] = d.cost.path_deviation;
    cost["smoothness"] = d.cost.smoothness;
    cost["lane_change"] = d.cost.lane_change;
    cost["proximity"] = d.cost.proximity;
    cost["total"] = d.cost.total;
    e["cost"] = cost;
    Json assess;
    for (const auto& [id, a] : d.assessments) {
      Json aj;
      aj["s_tdbm"] = a.s_tdbm;
      aj["danger"] = danger_from_safety_score(a.s_tdbm);
      aj["attention"] = Json::array(
          {a.attention[0], a.attention[1], a.attention[2], a.attention[3]});
      assess[id] = aj;
    }
    e["assessments"] = assess;
    Json feats;
    for (const auto& [id, f] : d.raw_features) feats[id] = feature_vector_to_json(f);
    e["features"] = feats;
    decisions.push_back(std::move(e));
  }
  j["decisions"] = decisions;
  return j;
}

std::string compare_table_csv(const std::vector<SimTrace>& runs) {
  std::ostringstream out;
  out << "cost_mode,collided,min_distance,min_distance_flagged,ego_lane_changes,"
         "time_within_dt_flagged,final_leader,avg_ego_speed\n";
  char buf[64];
  auto num = [&](std::optional<double> v) -> std::string {
    if (!v) return "";
    std::snprintf(buf, sizeof(buf), "%.6f", *v);
    return buf;
  };
  for (const auto& r : runs) {
    std::optional<double> twdt;
    if (r.summary.flagged_id) {
      auto it = r.summary.neighbors.find(*r.summary.flagged_id);
      if (it != r.summary.neighbors.end()) twdt = it->second.time_within_dt;
    }
    out << to_string(r.cost_mode) << ',' << (r.summary.collided ? 1 : 0) << ','
        << num(r.summary.min_distance_overall) << ',' << num(r.summary.min_distance_flagged)
        << ',' << r.summary.ego_lane_changes << ',' << num(twdt) << ','
        << (r.summary.final_leader ? *r.summary.final_leader : "") << ','
        << num(r.summary.avg_ego_speed) << '\n';
  }
  return out.str();
}

std::string lasso_path_csv(const LassoPath& path) {
  std::ostringstream out;
  out << "response,feature,elimination_log10_lambda\n";
  char buf[64];
  for (Eigen::Index i = 0; i < path.elimination_log10.rows(); ++i) {
    for (Eigen::Index f = 0; f < path.elimination_log10.cols(); ++f) {
      std::snprintf(buf, sizeof(buf), "%.6f", path.elimination_log10(i, f));
      out << 'b' << i << ',' << path.feature_names[static_cast<size_t>(f)] << ',' << buf
          << '\n';
    }
  }
  return out.str();
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file: " + path);
  out << content;
}

}  // namespace tdbm
