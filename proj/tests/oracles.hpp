#ifndef TDBM_TESTS_ORACLES_HPP
#define TDBM_TESTS_ORACLES_HPP

// Independent reference implementations used to pin expected values.
// These deliberately recompute everything densely and naively; keep them
// free of the streaming shortcuts used by the library.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "tdbm/features.hpp"
#include "tdbm/planner.hpp"
#include "tdbm/survey.hpp"
#include "tdbm/trajectory.hpp"

namespace tdbm::testing {

inline double oracle_trapezoid(const std::vector<double>& g, double h) {
  double acc = 0.0;
  for (size_t j = 1; j < g.size(); ++j) acc += 0.5 * h * (g[j - 1] + g[j]);
  return acc;
}

// Dense re-evaluation of the lane-following metric: per sample, re-sum the
// trailing drift-rate window from scratch (O(n^2)).
inline double oracle_lane_following(const Trajectory& traj, const LaneGeometry& geom,
                                    double k, double tau, double mu) {
  size_t n = traj.size();
  double h = traj.span() / static_cast<double>(n - 1);
  LaneChangeEvents events = detect_lane_changes(traj, geom, k);

  std::vector<double> drift(n), masked(n);
  for (size_t j = 0; j < n; ++j) {
    const auto& smp = traj.samples()[j];
    int lane = smp.lane_id ? *smp.lane_id : geom.nearest_lane(smp.y);
    drift[j] = smp.y - geom.center_of(lane);
    masked[j] = drift[j];
    for (double ti : events.times)
      if (std::abs(smp.t - ti) <= k + 1e-9) masked[j] = 0.0;
  }
  std::vector<double> rate(n);
  rate[0] = std::abs((drift[1] - drift[0]) / h);
  rate[n - 1] = std::abs((drift[n - 1] - drift[n - 2]) / h);
  for (size_t j = 1; j + 1 < n; ++j) rate[j] = std::abs((drift[j + 1] - drift[j - 1]) / (2.0 * h));

  size_t window = static_cast<size_t>(std::floor(tau / h + 1e-9));
  std::vector<double> g(n);
  for (size_t j = 0; j < n; ++j) {
    size_t lo = j > window ? j - window : 0;
    double inner = 0.0;
    for (size_t m = lo + 1; m <= j; ++m) inner += 0.5 * h * (rate[m - 1] + rate[m]);
    g[j] = std::abs(masked[j]) * (mu + inner);
  }
  return oracle_trapezoid(g, h);
}

// Dense re-evaluation of the neighbor relative-speed metric with its own
// interpolation (no neighbor_query).
inline double oracle_relative_speed(const TrajectoryLog& log, const std::string& target,
                                    double radius) {
  const Trajectory& tgt = log.trajectory(target);
  size_t n = tgt.size();
  double h = tgt.span() / static_cast<double>(n - 1);

  auto interp = [](const Trajectory& traj, double t, double& s, double& y, double& v) {
    const auto& ss = traj.samples();
    if (t < ss.front().t - 1e-9 || t > ss.back().t + 1e-9) return false;
    size_t j = 0;
    while (j + 1 < ss.size() && ss[j + 1].t < t) ++j;
    if (j + 1 == ss.size()) {
      s = ss[j].s;
      y = ss[j].y;
      v = ss[j].v;
      return true;
    }
    double u = (t - ss[j].t) / (ss[j + 1].t - ss[j].t);
    u = std::clamp(u, 0.0, 1.0);
    s = ss[j].s + u * (ss[j + 1].s - ss[j].s);
    y = ss[j].y + u * (ss[j + 1].y - ss[j].y);
    v = ss[j].v + u * (ss[j + 1].v - ss[j].v);
    return true;
  };

  std::vector<double> g(n, 0.0);
  for (size_t j = 0; j < n; ++j) {
    const auto& smp = tgt.samples()[j];
    for (const auto& [id, other] : log.trajectories()) {
      if (id == target) continue;
      double s, y, v;
      if (!interp(other, smp.t, s, y, v)) continue;
      double d = std::hypot(s - smp.s, y - smp.y);
      if (d > radius) continue;
      g[j] += std::max(0.0, (smp.v - v) / d);
    }
  }
  return oracle_trapezoid(g, h);
}

// KKT subgradient conditions for the penalized lasso objective
// (1/2N)*RSS + lambda*sum|beta|: returns the worst violation.
inline double lasso_kkt_violation(const SurveyDataset& data, int response, double lambda,
                                  double intercept, const Eigen::VectorXd& beta) {
  const Eigen::MatrixXd& x = data.features();
  Eigen::VectorXd r = data.responses().col(response) - x * beta;
  r.array() -= intercept;
  double inv_n = 1.0 / static_cast<double>(x.rows());
  double worst = std::abs(r.mean());  // intercept optimality
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double grad = -inv_n * x.col(j).dot(r);
    if (beta(j) == 0.0)
      worst = std::max(worst, std::abs(grad) - lambda);
    else
      worst = std::max(worst, std::abs(grad + lambda * (beta(j) > 0 ? 1.0 : -1.0)));
  }
  return worst;
}

// Point-sampled oriented-rectangle overlap at 10x finer time resolution:
// samples a grid of points inside the ego rectangle and tests containment
// in the neighbor rectangle (and vice versa).
inline bool point_in_rect(double px, double py, const OrientedRect& r) {
  double dx = px - r.cx;
  double dy = py - r.cy;
  double ca = std::cos(r.heading);
  double sa = std::sin(r.heading);
  double lx = ca * dx + sa * dy;
  double ly = -sa * dx + ca * dy;
  return std::abs(lx) <= r.half_len + 1e-12 && std::abs(ly) <= r.half_wid + 1e-12;
}

inline bool oracle_rects_overlap(const OrientedRect& a, const OrientedRect& b) {
  constexpr int kGrid = 24;
  auto sweep = [&](const OrientedRect& from, const OrientedRect& into) {
    double ca = std::cos(from.heading);
    double sa = std::sin(from.heading);
    for (int i = 0; i <= kGrid; ++i) {
      for (int j = 0; j <= kGrid; ++j) {
        double lx = (-1.0 + 2.0 * i / kGrid) * from.half_len;
        double ly = (-1.0 + 2.0 * j / kGrid) * from.half_wid;
        double px = from.cx + ca * lx - sa * ly;
        double py = from.cy + sa * lx + ca * ly;
        if (point_in_rect(px, py, into)) return true;
      }
    }
    return false;
  };
  return sweep(a, b) || sweep(b, a);
}

// true when the dense sweep finds an overlap anywhere along the candidate
inline bool oracle_candidate_collides(const CandidateTrajectory& cand,
                                      const std::vector<NeighborPrediction>& neighbors,
                                      const PlannerConfig& config) {
  if (cand.states.size() < 2) return false;
  double ego_hl = 0.5 * config.vehicle_length + config.collision_margin;
  double ego_hw = 0.5 * config.vehicle_width + config.collision_margin;
  for (size_t i = 1; i < cand.states.size(); ++i) {
    const EgoState& a = cand.states[i - 1];
    const EgoState& b = cand.states[i];
    for (int k = 1; k <= 10; ++k) {
      double u = k / 10.0;
      double es = a.s + u * (b.s - a.s);
      double ey = a.y + u * (b.y - a.y);
      double heading = std::abs(b.s - a.s) + std::abs(b.y - a.y) > 1e-9
                           ? std::atan2(b.y - a.y, b.s - a.s)
                           : 0.0;
      double t = a.t + u * (b.t - a.t) - cand.states[0].t;
      OrientedRect ego{es, ey, heading, ego_hl, ego_hw};
      for (const auto& nb : neighbors) {
        OrientedRect other{nb.s_at(t), nb.y0, 0.0, 0.5 * config.vehicle_length,
                           0.5 * config.vehicle_width};
        if (oracle_rects_overlap(ego, other)) return true;
      }
    }
  }
  return false;
}

}  // namespace tdbm::testing

#endif
