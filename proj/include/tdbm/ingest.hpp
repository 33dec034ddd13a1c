#ifndef TDBM_INGEST_HPP
#define TDBM_INGEST_HPP

#include <iosfwd>
#include <string>

#include "tdbm/trajectory.hpp"

namespace tdbm {

// Reads a trajectory CSV (header exactly `vehicle_id,t,s,y,v,lane_id`) and
// returns a validated log on a uniform grid of period `dt`.
//
// - Raw timestamps are resampled by linear interpolation; endpoint positions
//   are preserved exactly and already-uniform input passes through unchanged.
// - An empty `lane_id` is reconstructed as the nearest lane center.
// - An empty `v` anywhere in a vehicle's rows derives that vehicle's speed
//   as ds/dt (central differences, one-sided at the ends).
// - Gaps larger than 3*dt and non-monotone times raise ValidationError
//   naming the vehicle; malformed rows raise ParseError with the line
//   number; trajectories shorter than 3 samples are dropped and counted in
//   the result's IngestStats.
TrajectoryLog ingest_csv(const std::string& path, const LaneGeometry& geometry,
                         double dt = 0.1);

TrajectoryLog ingest_csv(std::istream& in, const LaneGeometry& geometry,
                         double dt = 0.1);

// Writes a log back out in the same CSV format with round-trip precision.
void write_csv(const TrajectoryLog& log, const std::string& path);
void write_csv(const TrajectoryLog& log, std::ostream& out);

}  // namespace tdbm

#endif  // TDBM_INGEST_HPP
