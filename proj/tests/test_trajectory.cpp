#include <doctest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "tdbm/errors.hpp"
#include "tdbm/ingest.hpp"
#include "tdbm/trajectory.hpp"

using namespace tdbm;
using namespace tdbm::testing;

namespace {

TrajectoryLog ingest_str(const std::string& csv, const LaneGeometry& geom, double dt = 0.1) {
  std::istringstream in(csv);
  return ingest_csv(in, geom, dt);
}

const LaneGeometry kGeom = LaneGeometry::uniform(3, 3.7);

}  // namespace

TEST_SUITE("trajectory") {

TEST_CASE("lane geometry validates spacing and lookups") {
  CHECK_THROWS_AS(LaneGeometry({0.0, 1.0, 3.0}, 1.0), ValidationError);
  CHECK_THROWS_AS(LaneGeometry({}, 1.0), ValidationError);
  CHECK_THROWS_AS(LaneGeometry::uniform(0, 3.7), ValidationError);

  CHECK(kGeom.lane_count() == 3);
  CHECK(kGeom.center_of(1) == doctest::Approx(3.7));
  CHECK(kGeom.nearest_lane(-5.0) == 0);
  CHECK(kGeom.nearest_lane(1.9) == 1);
  CHECK(kGeom.nearest_lane(100.0) == 2);
}

TEST_CASE("empty file with valid header gives an empty log") {
  auto log = ingest_str("vehicle_id,t,s,y,v,lane_id\n", kGeom);
  CHECK(log.vehicle_count() == 0);
  CHECK(log.stats().rows == 0);
}

TEST_CASE("uniform five-row vehicle passes through untouched") {
  auto log = ingest_str(
      "vehicle_id,t,s,y,v,lane_id\n"
      "a,0,0,0,10,0\n"
      "a,0.1,1,0,10,0\n"
      "a,0.2,2,0,10,0\n"
      "a,0.3,3,0,10,0\n"
      "a,0.4,4,0,10,0\n",
      kGeom);
  REQUIRE(log.vehicle_count() == 1);
  const Trajectory& traj = log.trajectory("a");
  REQUIRE(traj.size() == 5);
  CHECK(traj.dt() == doctest::Approx(0.1));
  for (size_t i = 0; i < 5; ++i) {
    CHECK(traj.samples()[i].t == doctest::Approx(0.1 * static_cast<double>(i)));
    CHECK(traj.samples()[i].s == doctest::Approx(1.0 * static_cast<double>(i)));
  }
  CHECK(traj.samples().back().s == 4.0);  // endpoint exact
}

TEST_CASE("duplicate timestamp names the vehicle") {
  CHECK_THROWS_WITH_AS(ingest_str("vehicle_id,t,s,y,v,lane_id\n"
                                  "car7,0,0,0,10,0\n"
                                  "car7,0.1,1,0,10,0\n"
                                  "car7,0.1,2,0,10,0\n"
                                  "car7,0.2,3,0,10,0\n",
                                  kGeom),
                       doctest::Contains("car7"), ValidationError);
}

TEST_CASE("gaps beyond 3*dt are rejected") {
  CHECK_THROWS_WITH_AS(ingest_str("vehicle_id,t,s,y,v,lane_id\n"
                                  "a,0,0,0,10,0\n"
                                  "a,0.1,1,0,10,0\n"
                                  "a,0.6,5,0,10,0\n",
                                  kGeom),
                       doctest::Contains("gap"), ValidationError);
}

TEST_CASE("malformed rows report the line number") {
  CHECK_THROWS_WITH_AS(ingest_str("vehicle_id,t,s,y,v,lane_id\n"
                                  "a,0,0,0,10,0\n"
                                  "a,zero,1,0,10,0\n",
                                  kGeom),
                       doctest::Contains("line 3"), ParseError);
  CHECK_THROWS_AS(ingest_str("vehicle,t,s,y,v,lane\n", kGeom), ParseError);
}

TEST_CASE("short trajectories are dropped with a warning count") {
  auto log = ingest_str(
      "vehicle_id,t,s,y,v,lane_id\n"
      "a,0,0,0,10,0\n"
      "a,0.1,1,0,10,0\n"
      "b,0,0,3.7,20,1\n"
      "b,0.1,2,3.7,20,1\n"
      "b,0.2,4,3.7,20,1\n",
      kGeom);
  CHECK(log.vehicle_count() == 1);
  CHECK(log.stats().dropped_short == 1);
  CHECK(log.has_vehicle("b"));
}

TEST_CASE("jittered timestamps are resampled, endpoints kept exactly") {
  auto log = ingest_str(
      "vehicle_id,t,s,y,v,lane_id\n"
      "a,0,0,0.5,10,\n"
      "a,0.104,1.04,0.5,10,\n"
      "a,0.196,1.96,0.5,10,\n"
      "a,0.3,3,0.5,10,\n",
      kGeom);
  const Trajectory& traj = log.trajectory("a");
  REQUIRE(traj.size() == 4);
  CHECK(traj.samples()[0].s == 0.0);
  CHECK(traj.samples()[3].s == 3.0);  // exact endpoint
  CHECK(traj.samples()[1].t == doctest::Approx(0.1));
  CHECK(traj.samples()[1].s == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(traj.samples()[1].lane_id.value() == 0);  // reconstructed
}

TEST_CASE("resampling is idempotent on uniform input") {
  std::ostringstream csv;
  csv << "vehicle_id,t,s,y,v,lane_id\n";
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  std::vector<double> ss, ys;
  for (int i = 0; i < 50; ++i) {
    double t = 0.1 * i;
    double s = 20.0 * t + u(rng);
    double y = 0.3 + u(rng);
    ss.push_back(s);
    ys.push_back(y);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "a,%.17g,%.17g,%.17g,20,\n", t, s, y);
    csv << buf;
  }
  auto log = ingest_str(csv.str(), kGeom);
  const Trajectory& traj = log.trajectory("a");
  REQUIRE(traj.size() == 50);
  for (size_t i = 0; i < 50; ++i) {
    CHECK(traj.samples()[i].s == ss[i]);
    CHECK(traj.samples()[i].y == ys[i]);
  }
}

TEST_CASE("missing v column is derived as ds/dt") {
  auto log = ingest_str(
      "vehicle_id,t,s,y,v,lane_id\n"
      "a,0,0,0,,0\n"
      "a,0.1,2,0,,0\n"
      "a,0.2,4,0,,0\n"
      "a,0.3,6,0,,0\n",
      kGeom);
  for (const auto& smp : log.trajectory("a").samples())
    CHECK(smp.v == doctest::Approx(20.0));
}

TEST_CASE("csv round trip preserves every sample bit-exactly") {
  std::mt19937_64 rng(11);
  std::vector<Trajectory> trajs;
  trajs.push_back(random_traj("a", rng, kGeom, 120, 0.1));
  trajs.push_back(random_traj("b", rng, kGeom, 120, 0.1));
  TrajectoryLog log(kGeom, std::move(trajs));

  std::ostringstream out;
  write_csv(log, out);
  std::istringstream in(out.str());
  TrajectoryLog back = ingest_csv(in, kGeom, 0.1);

  REQUIRE(back.vehicle_count() == 2);
  for (const auto& [id, traj] : log.trajectories()) {
    const Trajectory& rt = back.trajectory(id);
    REQUIRE(rt.size() == traj.size());
    for (size_t i = 0; i < traj.size(); ++i) {
      CHECK(rt.samples()[i].s == traj.samples()[i].s);
      CHECK(rt.samples()[i].y == traj.samples()[i].y);
      CHECK(rt.samples()[i].v == traj.samples()[i].v);
    }
  }
}

TEST_CASE("neighbor classification table") {
  // enumerated by hand: (lane delta, delta_s) -> class
  struct Row {
    int dl;
    double ds;
    RelPos expect;
  };
  const Row rows[] = {
      {0, 10.0, RelPos::kFront}, {0, -10.0, RelPos::kBack}, {0, 0.0, RelPos::kFront},
      {1, 5.0, RelPos::kLeft},   {1, -5.0, RelPos::kLeft},  {1, 0.0, RelPos::kLeft},
      {-1, 5.0, RelPos::kRight}, {-1, 0.0, RelPos::kRight}, {2, 0.0, RelPos::kFar},
      {-2, 3.0, RelPos::kFar},   {3, -9.0, RelPos::kFar},
  };
  for (const auto& r : rows) CHECK(classify_neighbor(5, 5 + r.dl, r.ds) == r.expect);
}

TEST_CASE("lone vehicle has no neighbors") {
  auto log = log_of(kGeom, {straight("a", 0.1, 20, 0, 20, 0)});
  CHECK(log.neighbor_query("a", 0.5, 1000.0).empty());
}

TEST_CASE("same-lane neighbor ahead classifies FRONT") {
  auto log = log_of(kGeom, {straight("a", 0.1, 20, 0, 20, 0),
                            straight("b", 0.1, 20, 10, 20, 0)});
  auto nbs = log.neighbor_query("a", 0.5, 1000.0);
  REQUIRE(nbs.size() == 1);
  CHECK(nbs[0].vehicle_id == "b");
  CHECK(nbs[0].rel == RelPos::kFront);
  CHECK(nbs[0].distance == doctest::Approx(10.0));
}

TEST_CASE("two lanes over at zero delta-s classifies FAR") {
  auto log = log_of(kGeom, {straight("a", 0.1, 20, 0, 20, 0),
                            straight("b", 0.1, 20, 0, 20, 7.4)});
  auto nbs = log.neighbor_query("a", 0.5, 1000.0);
  REQUIRE(nbs.size() == 1);
  CHECK(nbs[0].rel == RelPos::kFar);
}

TEST_CASE("radius excludes distant vehicles and unknown targets error") {
  auto log = log_of(kGeom, {straight("a", 0.1, 20, 0, 20, 0),
                            straight("b", 0.1, 20, 500, 20, 0)});
  CHECK(log.neighbor_query("a", 0.5, 100.0).empty());
  CHECK_THROWS_AS(log.neighbor_query("zz", 0.5, 100.0), ValidationError);
  CHECK_THROWS_AS(log.neighbor_query("a", 99.0, 100.0), ValidationError);  // not alive
}

TEST_CASE("neighbor query distance is symmetric") {
  std::mt19937_64 rng(3);
  std::vector<Trajectory> trajs;
  for (int i = 0; i < 5; ++i)
    trajs.push_back(random_traj("v" + std::to_string(i), rng, kGeom, 60, 0.1));
  TrajectoryLog log(kGeom, std::move(trajs));

  for (double t : {0.5, 2.0, 4.5}) {
    for (const auto& [id, traj] : log.trajectories()) {
      for (const auto& nb : log.neighbor_query(id, t, 120.0)) {
        auto other_side = log.neighbor_query(nb.vehicle_id, t, 120.0);
        bool found = false;
        for (const auto& back : other_side) found = found || back.vehicle_id == id;
        CHECK(found);
      }
    }
  }
}

TEST_CASE("every neighbor gets exactly one class") {
  std::mt19937_64 rng(4);
  std::vector<Trajectory> trajs;
  for (int i = 0; i < 6; ++i)
    trajs.push_back(random_traj("v" + std::to_string(i), rng, kGeom, 60, 0.1));
  TrajectoryLog log(kGeom, std::move(trajs));
  for (double t : {0.1, 1.7, 5.0}) {
    auto nbs = log.neighbor_query("v0", t, 2000.0);
    CHECK(nbs.size() == 5);
    for (const auto& nb : nbs) {
      int c = 0;
      for (RelPos p :
           {RelPos::kFront, RelPos::kBack, RelPos::kLeft, RelPos::kRight, RelPos::kFar})
        if (nb.rel == p) ++c;
      CHECK(c == 1);
    }
  }
}

TEST_CASE("trajectory slice keeps the window and validates length") {
  auto traj = straight("a", 0.1, 50, 0, 20, 0);
  auto sliced = traj.slice(1.0, 2.0);
  CHECK(sliced.size() == 11);
  CHECK(sliced.t_begin() == doctest::Approx(1.0));
  CHECK_THROWS_AS(traj.slice(0.0, 0.15), ValidationError);
}

}  // TEST_SUITE
