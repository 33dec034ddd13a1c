#ifndef TDBM_TESTS_HELPERS_HPP
#define TDBM_TESTS_HELPERS_HPP

#include <functional>
#include <random>
#include <vector>

#include "tdbm/trajectory.hpp"

namespace tdbm::testing {

// samples a trajectory from closed-form (s, y, v) functions of time
inline Trajectory make_traj(const std::string& id, double dt, size_t n,
                            const std::function<double(double)>& s_of,
                            const std::function<double(double)>& y_of,
                            const std::function<double(double)>& v_of) {
  std::vector<VehicleSample> samples(n);
  for (size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) * dt;
    samples[i] = {t, s_of(t), y_of(t), v_of(t), std::nullopt};
  }
  return Trajectory(id, std::move(samples), dt);
}

inline Trajectory straight(const std::string& id, double dt, size_t n, double s0, double v,
                           double y) {
  return make_traj(
      id, dt, n, [=](double t) { return s0 + v * t; }, [=](double) { return y; },
      [=](double) { return v; });
}

inline TrajectoryLog log_of(const LaneGeometry& geom, std::vector<Trajectory> trajs) {
  return TrajectoryLog(geom, std::move(trajs));
}

// smooth random trajectory within the road, for randomized oracle sweeps
inline Trajectory random_traj(const std::string& id, std::mt19937_64& rng,
                              const LaneGeometry& geom, size_t n, double dt) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double s0 = u01(rng) * 200.0;
  double v0 = 15.0 + 20.0 * u01(rng);
  double y0 = geom.y_min() + (geom.y_max() - geom.y_min()) * u01(rng);
  double amp_y = 1.5 * u01(rng);
  double per_y = 2.0 + 10.0 * u01(rng);
  double amp_v = 4.0 * u01(rng);
  double per_v = 3.0 + 12.0 * u01(rng);
  double phase = 6.28 * u01(rng);

  std::vector<VehicleSample> samples(n);
  double s = s0;
  for (size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) * dt;
    double v = v0 + amp_v * std::sin(2.0 * M_PI * t / per_v + phase);
    if (i > 0) s += 0.5 * dt * (v + samples[i - 1].v);  // consistent v/s pairing
    double y = y0 + amp_y * std::sin(2.0 * M_PI * t / per_y);
    y = std::clamp(y, geom.y_min(), geom.y_max());
    samples[i] = {t, s, y, v, std::nullopt};
  }
  return Trajectory(id, std::move(samples), dt);
}

}  // namespace tdbm::testing

#endif
