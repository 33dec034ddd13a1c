#include "tdbm/features.hpp"

#include <algorithm>
#include <cmath>

#include "tdbm/errors.hpp"

namespace tdbm {

const std::array<const char*, 10> kFeatureNames = {"f0", "f1", "f2", "f3", "f4",
                                                   "f5", "f6", "f7", "f8", "f9"};
const std::array<const char*, 10> kFeatureSymbols = {
    "v_front", "v_back", "v_left", "v_right", "v_nei",
    "v_avg",   "s_front", "j_l",   "j_p",     "s_center"};

namespace {

constexpr double kTimeEps = 1e-9;

int lane_of(const VehicleSample& smp, const LaneGeometry& geometry) {
  return smp.lane_id ? *smp.lane_id : geometry.nearest_lane(smp.y);
}

double grid_step(const Trajectory& traj) {
  return traj.span() / static_cast<double>(traj.size() - 1);
}

// First derivative on a uniform grid: central, one-sided at the ends.
std::vector<double> first_derivative(const std::vector<double>& x, double h) {
  size_t n = x.size();
  std::vector<double> d(n);
  d[0] = (x[1] - x[0]) / h;
  d[n - 1] = (x[n - 1] - x[n - 2]) / h;
  for (size_t j = 1; j + 1 < n; ++j) d[j] = (x[j + 1] - x[j - 1]) / (2.0 * h);
  return d;
}

// Third derivative on a uniform grid. The stencils (5-point central and
// one-sided) are exact on cubic polynomials at every sample, so the mean
// over the whole series keeps second-order accuracy.
std::vector<double> third_derivative(const std::vector<double>& x, double h) {
  size_t n = x.size();
  double h3 = 2.0 * h * h * h;
  std::vector<double> d(n);
  if (n == 4) {
    double v = (x[3] - 3.0 * x[2] + 3.0 * x[1] - x[0]) / (h * h * h);
    std::fill(d.begin(), d.end(), v);
    return d;
  }
  d[0] = (-5.0 * x[0] + 18.0 * x[1] - 24.0 * x[2] + 14.0 * x[3] - 3.0 * x[4]) / h3;
  d[1] = (-3.0 * x[0] + 10.0 * x[1] - 12.0 * x[2] + 6.0 * x[3] - x[4]) / h3;
  for (size_t j = 2; j + 2 < n; ++j)
    d[j] = (-x[j - 2] + 2.0 * x[j - 1] - 2.0 * x[j + 1] + x[j + 2]) / h3;
  d[n - 2] = (3.0 * x[n - 1] - 10.0 * x[n - 2] + 12.0 * x[n - 3] - 6.0 * x[n - 4] +
              x[n - 5]) / h3;
  d[n - 1] = (5.0 * x[n - 1] - 18.0 * x[n - 2] + 24.0 * x[n - 3] - 14.0 * x[n - 4] +
              3.0 * x[n - 5]) / h3;
  return d;
}

double trapezoid(const std::vector<double>& g, double h) {
  double acc = 0.0;
  for (size_t j = 1; j < g.size(); ++j) acc += 0.5 * h * (g[j - 1] + g[j]);
  return acc;
}

double mean_abs(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += std::abs(v);
  return acc / static_cast<double>(x.size());
}

}  // namespace

LaneChangeEvents detect_lane_changes(const Trajectory& traj, const LaneGeometry& geometry,
                                     double k) {
  const auto& ss = traj.samples();

  // compress the nearest-lane assignment into runs of constant lane
  struct Run {
    int lane;
    double start;
    double end;
  };
  std::vector<Run> runs;
  for (const auto& smp : ss) {
    int lane = lane_of(smp, geometry);
    if (runs.empty() || runs.back().lane != lane)
      runs.push_back({lane, smp.t, smp.t});
    else
      runs.back().end = smp.t;
  }
  // a run extends until the next switch instant
  for (size_t i = 0; i + 1 < runs.size(); ++i) runs[i].end = runs[i + 1].start;

  LaneChangeEvents ev;
  ev.dwell_k = k;
  std::optional<int> stable_lane;
  for (const auto& run : runs) {
    if (run.end - run.start < k - kTimeEps) continue;  // too short to confirm
    if (stable_lane && run.lane != *stable_lane) ev.times.push_back(run.start);
    stable_lane = run.lane;
  }
  return ev;
}

std::vector<double> unmasked_drift(const Trajectory& traj, const LaneGeometry& geometry) {
  std::vector<double> d(traj.size());
  const auto& ss = traj.samples();
  for (size_t j = 0; j < ss.size(); ++j)
    d[j] = ss[j].y - geometry.center_of(lane_of(ss[j], geometry));
  return d;
}

std::vector<double> lane_drift(const Trajectory& traj, const LaneGeometry& geometry,
                               const LaneChangeEvents& events, double k) {
  std::vector<double> d = unmasked_drift(traj, geometry);
  const auto& ss = traj.samples();
  for (double ti : events.times) {
    for (size_t j = 0; j < ss.size(); ++j)
      if (std::abs(ss[j].t - ti) <= k + kTimeEps) d[j] = 0.0;
  }
  return d;
}

double lane_following_metric(const Trajectory& traj, const LaneGeometry& geometry,
                             double k, double tau, double mu) {
  if (traj.span() < tau - kTimeEps)
    throw ValidationError("trajectory of " + traj.vehicle_id() +
                          " shorter than the drift-rate window tau");
  double h = grid_step(traj);
  size_t n = traj.size();

  LaneChangeEvents events = detect_lane_changes(traj, geometry, k);
  std::vector<double> masked = lane_drift(traj, geometry, events, k);
  std::vector<double> rate = first_derivative(unmasked_drift(traj, geometry), h);
  for (double& r : rate) r = std::abs(r);

  // prefix trapezoid of |drift rate|; the trailing window covers a whole
  // number of samples (tau snapped down) and truncates at the start
  std::vector<double> prefix(n, 0.0);
  for (size_t j = 1; j < n; ++j)
    prefix[j] = prefix[j - 1] + 0.5 * h * (rate[j - 1] + rate[j]);
  size_t window = static_cast<size_t>(std::floor(tau / h + kTimeEps));

  std::vector<double> g(n);
  for (size_t j = 0; j < n; ++j) {
    size_t lo = j > window ? j - window : 0;
    g[j] = std::abs(masked[j]) * (mu + prefix[j] - prefix[lo]);
  }
  return trapezoid(g, h);
}

double relative_speed_metric(const TrajectoryLog& log, const std::string& target,
                             double radius) {
  const Trajectory& tgt = log.trajectory(target);
  if (tgt.size() < 2)
    throw ValidationError("target " + target + " has no positive-length interval");
  double h = grid_step(tgt);

  std::vector<double> g(tgt.size(), 0.0);
  for (size_t j = 0; j < tgt.size(); ++j) {
    const VehicleSample& smp = tgt.samples()[j];
    for (const Neighbor& nb : log.neighbor_query(target, smp.t, radius)) {
      if (nb.distance < 1e-9)
        throw ValidationError("vehicles " + target + " and " + nb.vehicle_id +
                              " overlap at t=" + std::to_string(smp.t));
      g[j] += std::max(0.0, (smp.v - nb.state.v) / nb.distance);
    }
  }
  return trapezoid(g, h);
}

std::pair<double, double> jerk_metrics(const Trajectory& traj) {
  if (traj.size() < 4)
    throw ValidationError("jerk estimation needs at least 4 samples");
  double h = grid_step(traj);
  std::vector<double> y(traj.size()), s(traj.size());
  for (size_t j = 0; j < traj.size(); ++j) {
    y[j] = traj.samples()[j].y;
    s[j] = traj.samples()[j].s;
  }
  return {mean_abs(third_derivative(y, h)), mean_abs(third_derivative(s, h))};
}

std::array<std::optional<double>, 4> directional_relative_speeds(
    const TrajectoryLog& log, const std::string& target, double radius) {
  const Trajectory& tgt = log.trajectory(target);
  std::array<double, 4> sum{};
  std::array<size_t, 4> count{};

  auto slot = [](RelPos p) -> int {
    switch (p) {
      case RelPos::kFront: return 0;
      case RelPos::kBack: return 1;
      case RelPos::kLeft: return 2;
      case RelPos::kRight: return 3;
      default: return -1;
    }
  };

  for (const auto& smp : tgt.samples()) {
    std::array<const Neighbor*, 4> nearest{};
    auto neighbors = log.neighbor_query(target, smp.t, radius);
    for (const Neighbor& nb : neighbors) {
      int i = slot(nb.rel);
      if (i < 0) continue;
      if (!nearest[i] || nb.distance < nearest[i]->distance)
        nearest[i] = &nb;
    }
    for (int i = 0; i < 4; ++i) {
      if (!nearest[i]) continue;
      sum[i] += smp.v - nearest[i]->state.v;
      ++count[i];
    }
  }

  std::array<std::optional<double>, 4> out;
  for (int i = 0; i < 4; ++i)
    if (count[i] > 0) out[i] = sum[i] / static_cast<double>(count[i]);
  return out;
}

std::pair<double, double> simple_metrics(const TrajectoryLog& log, const std::string& target,
                                         double radius, double d_max) {
  const Trajectory& tgt = log.trajectory(target);
  double v_sum = 0.0;
  double gap_sum = 0.0;
  for (const auto& smp : tgt.samples()) {
    v_sum += smp.v;
    const Neighbor* front = nullptr;
    for (const Neighbor& nb : log.neighbor_query(target, smp.t, radius)) {
      if (nb.rel != RelPos::kFront) continue;
      if (!front || nb.distance < front->distance) front = &nb;
    }
    gap_sum += front ? front->delta_s : d_max;
  }
  double n = static_cast<double>(tgt.size());
  return {v_sum / n, gap_sum / n};
}

FeatureVector extract_all(const TrajectoryLog& log, const std::string& target,
                          const FeatureParams& params) {
  const Trajectory& full = log.trajectory(target);
  double t0 = params.window_begin.value_or(full.t_begin());
  double t1 = params.window_end.value_or(full.t_end());
  if (t1 <= t0) throw UsageError("feature window must have positive length");

  // restrict the target to the window; neighbors keep their full tracks
  std::vector<Trajectory> trajs;
  trajs.reserve(log.trajectories().size());
  for (const auto& [id, traj] : log.trajectories())
    trajs.push_back(id == target ? traj.slice(t0, t1) : traj);
  TrajectoryLog windowed(log.geometry(), std::move(trajs));
  const Trajectory& tgt = windowed.trajectory(target);

  FeatureVector out;
  auto dir = directional_relative_speeds(windowed, target, params.neighbor_radius);
  for (int i = 0; i < 4; ++i) out[static_cast<size_t>(i)] = dir[static_cast<size_t>(i)];
  out[4] = relative_speed_metric(windowed, target, params.neighbor_radius);
  auto [v_avg, s_front] =
      simple_metrics(windowed, target, params.neighbor_radius, params.front_d_max);
  out[5] = v_avg;
  out[6] = s_front;
  auto [j_l, j_p] = jerk_metrics(tgt);
  out[7] = j_l;
  out[8] = j_p;
  out[9] = lane_following_metric(tgt, log.geometry(), params.dwell_k, params.drift_tau,
                                 params.drift_mu);
  return out;
}

namespace {

double percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  double r = p * static_cast<double>(values.size() - 1);
  size_t lo = static_cast<size_t>(std::floor(r));
  size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = r - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace

NormalizationParams fit_normalization(const std::vector<FeatureVector>& vectors) {
  if (vectors.size() < 20)
    throw UsageError("normalization fit needs at least 20 feature vectors");
  NormalizationParams out;
  for (int i = 0; i < 10; ++i) {
    std::vector<double> values;
    for (const auto& v : vectors)
      if (v[static_cast<size_t>(i)]) values.push_back(*v[static_cast<size_t>(i)]);
    if (values.empty()) continue;
    FeatureScale sc;
    sc.p5 = percentile(values, 0.05);
    sc.p95 = percentile(values, 0.95);
    if (!(sc.p95 > sc.p5))
      throw ValidationError(std::string("degenerate spread for feature ") +
                            kFeatureNames[static_cast<size_t>(i)] +
                            " (p95 == p5)");
    out.scales[i] = sc;
  }
  return out;
}

FeatureVector normalize(const FeatureVector& v, const NormalizationParams& p) {
  FeatureVector out = v;
  for (const auto& [i, sc] : p.scales) {
    auto& slot = out[static_cast<size_t>(i)];
    if (slot) slot = (*slot - sc.p5) / (sc.p95 - sc.p5);
  }
  return out;
}

}  // namespace tdbm
