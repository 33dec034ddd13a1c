// tdbm — trajectory-to-driver-behavior toolkit command line.
//
// Subcommands: extract, score, fit, lasso-path, pca, loocv, fit-norm,
// simulate, compare. Structured outputs are JSON (CSV for tabular series);
// every output embeds a run manifest or gets one written beside it.
//
// Exit codes: 0 ok, 1 usage, 2 input validation, 3 numerical/fit failure,
// 4 collision-terminated simulation.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "tdbm/errors.hpp"
#include "tdbm/ingest.hpp"
#include "tdbm/io_json.hpp"
#include "tdbm/lasso.hpp"
#include "tdbm/regression.hpp"
#include "tdbm/survey.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCollision = 4;

using tdbm::Json;

// FNV-1a over the file bytes; enough to pin inputs in the manifest.
std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "unreadable";
  std::uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

struct ManifestBuilder {
  std::string subcommand;
  Json config = Json::object();
  Json inputs = Json::object();
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  void input(const std::string& label, const std::string& path) {
    Json e;
    e["path"] = path;
    e["digest"] = file_digest(path);
    inputs[label] = e;
  }

  Json build() const {
    Json m;
    m["tool"] = "tdbm";
    m["version"] = kToolVersion;
    m["subcommand"] = subcommand;
    m["config"] = config;
    m["inputs"] = inputs;
    auto now = std::chrono::system_clock::now();
    m["timestamp_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
    m["duration_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
    return m;
  }
};

void emit_json(Json payload, const ManifestBuilder& manifest, const std::string& out_path) {
  payload["manifest"] = manifest.build();
  std::string text = payload.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    tdbm::write_text_file(out_path, text);
}

// CSV payloads get a sibling <path>.manifest.json
void emit_csv(const std::string& csv, const ManifestBuilder& manifest,
              const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << csv;
    return;
  }
  tdbm::write_text_file(out_path, csv);
  tdbm::write_text_file(out_path + ".manifest.json", manifest.build().dump(2) + "\n");
}

tdbm::LaneGeometry geometry_from_flags(int lanes, double width, double y0) {
  return tdbm::LaneGeometry::uniform(lanes, width, y0);
}

struct ExtractArgs {
  std::string trajectories;
  std::string target;
  int lanes = 3;
  double lane_width = 3.7;
  double y0 = 0.0;
  double dt = 0.1;
  std::vector<double> window;
  std::string params_path;
  std::string norm_path;
  std::string out;
};

tdbm::FeatureParams params_from_file(const std::string& path) {
  tdbm::FeatureParams p;
  if (path.empty()) return p;
  Json j = tdbm::read_json_file(path);
  if (j.contains("dwell_k")) p.dwell_k = j.at("dwell_k").get<double>();
  if (j.contains("drift_tau")) p.drift_tau = j.at("drift_tau").get<double>();
  if (j.contains("drift_mu")) p.drift_mu = j.at("drift_mu").get<double>();
  if (j.contains("neighbor_radius")) p.neighbor_radius = j.at("neighbor_radius").get<double>();
  if (j.contains("front_d_max")) p.front_d_max = j.at("front_d_max").get<double>();
  return p;
}

Json params_to_json(const tdbm::FeatureParams& p) {
  Json j;
  j["dwell_k"] = p.dwell_k;
  j["drift_tau"] = p.drift_tau;
  j["drift_mu"] = p.drift_mu;
  j["neighbor_radius"] = p.neighbor_radius;
  j["front_d_max"] = p.front_d_max;
  return j;
}

int run_extract(const ExtractArgs& a) {
  ManifestBuilder mb;
  mb.subcommand = "extract";
  mb.input("trajectories", a.trajectories);

  tdbm::LaneGeometry geom = geometry_from_flags(a.lanes, a.lane_width, a.y0);
  tdbm::TrajectoryLog log = tdbm::ingest_csv(a.trajectories, geom, a.dt);
  tdbm::FeatureParams params = params_from_file(a.params_path);
  if (a.window.size() == 2) {
    params.window_begin = a.window[0];
    params.window_end = a.window[1];
  }
  tdbm::FeatureVector features = tdbm::extract_all(log, a.target, params);
  if (!a.norm_path.empty()) {
    mb.input("norm", a.norm_path);
    features = tdbm::normalize(features, tdbm::load_normalization(a.norm_path));
  }

  const tdbm::Trajectory& tgt = log.trajectory(a.target);
  Json out;
  out["target"] = a.target;
  out["window"] = Json::array({params.window_begin.value_or(tgt.t_begin()),
                               params.window_end.value_or(tgt.t_end())});
  out["params"] = params_to_json(params);
  out["normalized"] = !a.norm_path.empty();
  out["features"] = tdbm::feature_vector_to_json(features);
  mb.config["dt"] = a.dt;
  mb.config["lanes"] = a.lanes;
  mb.config["lane_width"] = a.lane_width;
  emit_json(out, mb, a.out);
  return kExitOk;
}

struct ScoreArgs {
  std::string features_path;
  std::string trajectories;
  std::string target;
  int lanes = 3;
  double lane_width = 3.7;
  double y0 = 0.0;
  double dt = 0.1;
  std::string maps = "builtin";
  std::string norm_path;
  std::string out;
};

int run_score(const ScoreArgs& a) {
  ManifestBuilder mb;
  mb.subcommand = "score";

  tdbm::FeatureVector features;
  if (!a.features_path.empty()) {
    mb.input("features", a.features_path);
    Json j = tdbm::read_json_file(a.features_path);
    features = tdbm::feature_vector_from_json(j.contains("features") ? j.at("features") : j);
  } else {
    if (a.trajectories.empty() || a.target.empty())
      throw tdbm::UsageError("score needs --features or --trajectories with --target");
    mb.input("trajectories", a.trajectories);
    tdbm::LaneGeometry geom = geometry_from_flags(a.lanes, a.lane_width, a.y0);
    tdbm::TrajectoryLog log = tdbm::ingest_csv(a.trajectories, geom, a.dt);
    features = tdbm::extract_all(log, a.target, {});
  }
  if (!a.norm_path.empty()) {
    mb.input("norm", a.norm_path);
    features = tdbm::normalize(features, tdbm::load_normalization(a.norm_path));
  }

  tdbm::LinearMapSet maps;
  if (a.maps == "builtin") {
    maps = tdbm::paper_map_set();
  } else {
    mb.input("maps", a.maps);
    maps = tdbm::load_map_set(a.maps);
  }
  tdbm::ScoreReport report = tdbm::score(features, maps);

  Json out = tdbm::score_report_to_json(report);
  out["features"] = tdbm::feature_vector_to_json(features);
  mb.config["maps"] = a.maps;
  emit_json(out, mb, a.out);
  return kExitOk;
}

int run_fit(const std::string& survey, const std::string& out_path) {
  ManifestBuilder mb;
  mb.subcommand = "fit";
  mb.input("survey", survey);
  tdbm::SurveyDataset data = tdbm::SurveyDataset::from_csv(survey);
  tdbm::LinearMapSet maps = tdbm::derive_map_set(data);
  emit_json(tdbm::map_set_to_json(maps), mb, out_path);
  return kExitOk;
}

int run_lasso_path(const std::string& survey, const std::string& out_path, int grid,
                   double min_ratio) {
  ManifestBuilder mb;
  mb.subcommand = "lasso-path";
  mb.input("survey", survey);
  mb.config["grid"] = grid;
  mb.config["lambda_min_ratio"] = min_ratio;
  tdbm::SurveyDataset data = tdbm::SurveyDataset::from_csv(survey);
  tdbm::LassoPath path = tdbm::lasso_path(data, grid, min_ratio);
  emit_csv(tdbm::lasso_path_csv(path), mb, out_path);
  return kExitOk;
}

int run_pca(const std::string& survey, const std::string& out_path) {
  ManifestBuilder mb;
  mb.subcommand = "pca";
  mb.input("survey", survey);
  tdbm::SurveyDataset data = tdbm::SurveyDataset::from_csv(survey);
  emit_json(tdbm::pca_result_to_json(tdbm::pca(data)), mb, out_path);
  return kExitOk;
}

int run_loocv(const std::string& survey, const std::string& out_path) {
  ManifestBuilder mb;
  mb.subcommand = "loocv";
  mb.input("survey", survey);
  tdbm::SurveyDataset data = tdbm::SurveyDataset::from_csv(survey);
  tdbm::LoocvResult r = tdbm::loocv(data);
  Json out;
  Json errs = Json::object();
  for (size_t i = 0; i < 10; ++i)
    errs["b" + std::to_string(i)] = r.mean_abs_error[i];
  out["mean_abs_error"] = errs;
  out["fits"] = r.fits;
  emit_json(out, mb, out_path);
  return kExitOk;
}

struct FitNormArgs {
  std::string scenario;
  std::string trajectories;
  int lanes = 3;
  double lane_width = 3.7;
  double y0 = 0.0;
  double dt = 0.1;
  double window = 10.0;
  double stride = 5.0;
  std::string out;
};

// Slides fixed-length windows over every vehicle of a log (simulated from a
// scenario or ingested from CSV) and fits percentile scales on the
// resulting feature vectors.
int run_fit_norm(const FitNormArgs& a) {
  ManifestBuilder mb;
  mb.subcommand = "fit-norm";
  mb.config["window"] = a.window;
  mb.config["stride"] = a.stride;

  std::optional<tdbm::TrajectoryLog> log;
  if (!a.scenario.empty()) {
    mb.input("scenario", a.scenario);
    tdbm::Scenario sc = tdbm::load_scenario(a.scenario);
    log = tdbm::run(sc).log;
  } else if (!a.trajectories.empty()) {
    mb.input("trajectories", a.trajectories);
    log = tdbm::ingest_csv(a.trajectories, geometry_from_flags(a.lanes, a.lane_width, a.y0),
                           a.dt);
  } else {
    throw tdbm::UsageError("fit-norm needs --scenario or --trajectories");
  }

  std::vector<tdbm::FeatureVector> vectors;
  for (const auto& [id, traj] : log->trajectories()) {
    for (double t0 = traj.t_begin(); t0 + a.window <= traj.t_end() + 1e-9; t0 += a.stride) {
      tdbm::FeatureParams p;
      p.window_begin = t0;
      p.window_end = t0 + a.window;
      vectors.push_back(tdbm::extract_all(*log, id, p));
    }
  }
  mb.config["vectors"] = vectors.size();
  tdbm::NormalizationParams norm = tdbm::fit_normalization(vectors);
  emit_json(tdbm::normalization_to_json(norm), mb, a.out);
  return kExitOk;
}

struct SimulateArgs {
  std::string scenario;
  std::string cost;
  std::string out;
  std::string csv_out;
  std::string dump_costs;
};

int run_simulate(const SimulateArgs& a) {
  ManifestBuilder mb;
  mb.subcommand = "simulate";
  mb.input("scenario", a.scenario);

  tdbm::Scenario sc = tdbm::load_scenario(a.scenario);
  if (!a.cost.empty()) sc.planner.cost_mode = tdbm::cost_mode_from_string(a.cost);
  mb.config["cost_mode"] = to_string(sc.planner.cost_mode);
  mb.config["seed"] = sc.seed;

  tdbm::SimTrace trace = tdbm::run(sc);
  emit_json(tdbm::trace_to_json(trace), mb, a.out);
  if (!a.csv_out.empty()) tdbm::write_csv(trace.log, a.csv_out);
  if (!a.dump_costs.empty()) {
    std::ostringstream csv;
    csv << "t,lane_delta,speed_offset,target_lane,fallback,path_deviation,smoothness,"
           "lane_change,proximity,total\n";
    char buf[256];
    for (const auto& d : trace.decisions) {
      std::snprintf(buf, sizeof(buf), "%.3f,%d,%.2f,%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g\n", d.t,
                    d.lane_delta, d.speed_offset, d.target_lane, d.fallback ? 1 : 0,
                    d.cost.path_deviation, d.cost.smoothness, d.cost.lane_change,
                    d.cost.proximity, d.cost.total);
      csv << buf;
    }
    tdbm::write_text_file(a.dump_costs, csv.str());
  }
  return trace.summary.collided ? kExitCollision : kExitOk;
}

int run_compare(const std::string& scenario_path, const std::vector<std::string>& costs,
                const std::string& out_path) {
  ManifestBuilder mb;
  mb.subcommand = "compare";
  mb.input("scenario", scenario_path);

  tdbm::Scenario sc = tdbm::load_scenario(scenario_path);
  std::vector<tdbm::CostMode> modes;
  for (const auto& c : costs) modes.push_back(tdbm::cost_mode_from_string(c));
  if (modes.empty())
    throw tdbm::UsageError("compare needs at least one cost mode in --costs");
  mb.config["costs"] = costs;

  auto runs = tdbm::compare(sc, modes);
  emit_csv(tdbm::compare_table_csv(runs), mb, out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tdbm: driver-behavior features, score maps and behavior-aware planning"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // extract
  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Extract features f0..f9 for one vehicle");
  extract->add_option("--trajectories", ex.trajectories, "Trajectory CSV path")->required();
  extract->add_option("--target", ex.target, "Vehicle id to extract")->required();
  extract->add_option("--lanes", ex.lanes, "Lane count [#]");
  extract->add_option("--lane-width", ex.lane_width, "Lane width [m]");
  extract->add_option("--lane-y0", ex.y0, "Center of lane 0 [m]");
  extract->add_option("--dt", ex.dt, "Resampling period [s]");
  extract->add_option("--window", ex.window, "Window begin and end [s s]")->expected(2);
  extract->add_option("--params", ex.params_path, "Feature parameter JSON path");
  extract->add_option("--norm", ex.norm_path, "Normalization JSON; output normalized");
  extract->add_option("--out", ex.out, "Output JSON path (default stdout)");

  // score
  ScoreArgs sa;
  auto* score_cmd = app.add_subcommand("score", "Map features to behavior/attention/safety scores");
  score_cmd->add_option("--features", sa.features_path, "Feature JSON path");
  score_cmd->add_option("--trajectories", sa.trajectories, "Trajectory CSV path");
  score_cmd->add_option("--target", sa.target, "Vehicle id when extracting");
  score_cmd->add_option("--lanes", sa.lanes, "Lane count [#]");
  score_cmd->add_option("--lane-width", sa.lane_width, "Lane width [m]");
  score_cmd->add_option("--lane-y0", sa.y0, "Center of lane 0 [m]");
  score_cmd->add_option("--dt", sa.dt, "Resampling period [s]");
  score_cmd->add_option("--maps", sa.maps, "Map JSON path or 'builtin' (default)");
  score_cmd->add_option("--norm", sa.norm_path, "Normalization JSON applied before scoring");
  score_cmd->add_option("--out", sa.out, "Output JSON path (default stdout)");

  // fit
  std::string fit_survey, fit_out;
  auto* fit = app.add_subcommand("fit", "Re-derive the map set from survey data");
  fit->add_option("--survey", fit_survey, "Survey CSV path")->required();
  fit->add_option("--out", fit_out, "Output maps JSON path (default stdout)");

  // lasso-path
  std::string lp_survey, lp_out;
  int lp_grid = 100;
  double lp_ratio = 1e-4;
  auto* lp = app.add_subcommand("lasso-path", "Feature elimination path over the lambda grid");
  lp->add_option("--survey", lp_survey, "Survey CSV path")->required();
  lp->add_option("--grid", lp_grid, "Lambda grid size [#]");
  lp->add_option("--min-ratio", lp_ratio, "Smallest lambda as a fraction of lambda_max");
  lp->add_option("--out", lp_out, "Output CSV path (default stdout)");

  // pca
  std::string pca_survey, pca_out;
  auto* pca_cmd = app.add_subcommand("pca", "Principal components of the behavior responses");
  pca_cmd->add_option("--survey", pca_survey, "Survey CSV path")->required();
  pca_cmd->add_option("--out", pca_out, "Output JSON path (default stdout)");

  // loocv
  std::string cv_survey, cv_out;
  auto* cv = app.add_subcommand("loocv", "Leave-one-out cross-validation errors");
  cv->add_option("--survey", cv_survey, "Survey CSV path")->required();
  cv->add_option("--out", cv_out, "Output JSON path (default stdout)");

  // fit-norm
  FitNormArgs fn;
  auto* fitnorm = app.add_subcommand("fit-norm", "Fit percentile normalization on a corpus");
  fitnorm->add_option("--scenario", fn.scenario, "Scenario JSON to simulate as corpus");
  fitnorm->add_option("--trajectories", fn.trajectories, "Trajectory CSV corpus");
  fitnorm->add_option("--lanes", fn.lanes, "Lane count [#]");
  fitnorm->add_option("--lane-width", fn.lane_width, "Lane width [m]");
  fitnorm->add_option("--lane-y0", fn.y0, "Center of lane 0 [m]");
  fitnorm->add_option("--dt", fn.dt, "Resampling period [s]");
  fitnorm->add_option("--window", fn.window, "Feature window length [s]");
  fitnorm->add_option("--stride", fn.stride, "Window stride [s]");
  fitnorm->add_option("--out", fn.out, "Output JSON path (default stdout)");

  // simulate
  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario with the planner in the loop");
  simulate->add_option("--scenario", sim.scenario, "Scenario JSON path")->required();
  simulate->add_option("--cost", sim.cost,
                       "Cost mode override: baseline-exp, paper-exact or monotone");
  simulate->add_option("--out", sim.out, "Trace JSON path (default stdout)");
  simulate->add_option("--trajectory-csv", sim.csv_out, "Also write the trajectory CSV here");
  simulate->add_option("--dump-costs", sim.dump_costs, "Per-cycle cost breakdown CSV path");

  // compare
  std::string cmp_scenario, cmp_out;
  std::vector<std::string> cmp_costs;
  auto* compare_cmd = app.add_subcommand("compare", "Run one scenario under several cost modes");
  compare_cmd->add_option("--scenario", cmp_scenario, "Scenario JSON path")->required();
  compare_cmd->add_option("--costs", cmp_costs, "Cost modes to compare")
      ->delimiter(',')
      ->required();
  compare_cmd->add_option("--out", cmp_out, "Output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*extract) return run_extract(ex);
    if (*score_cmd) return run_score(sa);
    if (*fit) return run_fit(fit_survey, fit_out);
    if (*lp) return run_lasso_path(lp_survey, lp_out, lp_grid, lp_ratio);
    if (*pca_cmd) return run_pca(pca_survey, pca_out);
    if (*cv) return run_loocv(cv_survey, cv_out);
    if (*fitnorm) return run_fit_norm(fn);
    if (*simulate) return run_simulate(sim);
    if (*compare_cmd) return run_compare(cmp_scenario, cmp_costs, cmp_out);
  } catch (const tdbm::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tdbm::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const tdbm::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const tdbm::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
