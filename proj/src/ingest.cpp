#include "tdbm/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "tdbm/errors.hpp"

namespace tdbm {

namespace {

struct RawRow {
  double t = 0.0;
  double s = 0.0;
  double y = 0.0;
  std::optional<double> v;
  std::optional<int> lane_id;
};

constexpr const char* kHeader = "vehicle_id,t,s,y,v,lane_id";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, size_t line_no, const char* field) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": bad value for '" +
                     field + "': '" + s + "'");
  }
}

// Resamples raw rows onto a uniform grid spanning [t0, tN] exactly. The grid
// step is (tN - t0) / round((tN - t0) / dt), which equals dt whenever the raw
// span is a whole number of periods; both endpoints are kept verbatim.
std::vector<VehicleSample> resample(const std::string& id, const std::vector<RawRow>& rows,
                                    double dt, const LaneGeometry& geometry) {
  for (size_t i = 0; i + 1 < rows.size(); ++i) {
    if (rows[i + 1].t <= rows[i].t)
      throw ValidationError("vehicle " + id + " has non-monotone timestamps at t=" +
                            std::to_string(rows[i + 1].t));
    if (rows[i + 1].t - rows[i].t > 3.0 * dt + 1e-9)
      throw ValidationError("vehicle " + id + " has a gap larger than 3*dt at t=" +
                            std::to_string(rows[i].t));
  }

  double t0 = rows.front().t;
  double tN = rows.back().t;
  size_t n_steps = static_cast<size_t>(std::llround((tN - t0) / dt));
  if (n_steps == 0) n_steps = 1;
  double h = (tN - t0) / static_cast<double>(n_steps);

  std::vector<VehicleSample> out(n_steps + 1);
  size_t j = 0;  // rows[j].t <= grid time < rows[j+1].t
  for (size_t i = 0; i <= n_steps; ++i) {
    double t = (i == n_steps) ? tN : t0 + static_cast<double>(i) * h;
    while (j + 1 < rows.size() && rows[j + 1].t <= t + 1e-12) ++j;
    VehicleSample smp;
    smp.t = t;
    if (std::abs(rows[j].t - t) < 1e-12 || j + 1 == rows.size()) {
      smp.s = rows[j].s;
      smp.y = rows[j].y;
      if (rows[j].v) smp.v = *rows[j].v;
      smp.lane_id = rows[j].lane_id;
    } else {
      const RawRow& a = rows[j];
      const RawRow& b = rows[j + 1];
      double u = (t - a.t) / (b.t - a.t);
      smp.s = a.s + u * (b.s - a.s);
      smp.y = a.y + u * (b.y - a.y);
      if (a.v && b.v) smp.v = *a.v + u * (*b.v - *a.v);
      smp.lane_id = (u < 0.5) ? a.lane_id : b.lane_id;
    }
    out[i] = smp;
  }

  bool any_v_missing = false;
  for (const auto& r : rows)
    if (!r.v) any_v_missing = true;
  if (any_v_missing) {
    // derive v = ds/dt on the uniform grid
    size_t n = out.size();
    for (size_t i = 0; i < n; ++i) {
      if (i == 0)
        out[i].v = (out[1].s - out[0].s) / h;
      else if (i == n - 1)
        out[i].v = (out[n - 1].s - out[n - 2].s) / h;
      else
        out[i].v = (out[i + 1].s - out[i - 1].s) / (2.0 * h);
    }
  }

  for (auto& smp : out)
    if (!smp.lane_id) smp.lane_id = geometry.nearest_lane(smp.y);
  return out;
}

}  // namespace

TrajectoryLog ingest_csv(std::istream& in, const LaneGeometry& geometry, double dt) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw ParseError(std::string("bad header, expected '") + kHeader + "', got '" + line + "'");

  // keyed by vehicle, preserving first-seen row order within each vehicle
  std::map<std::string, std::vector<RawRow>> by_vehicle;
  IngestStats stats;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 6)
      throw ParseError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                       std::to_string(fields.size()));
    if (fields[0].empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty vehicle_id");
    RawRow row;
    row.t = parse_double(fields[1], line_no, "t");
    if (row.t < 0.0)
      throw ParseError("line " + std::to_string(line_no) + ": negative time");
    row.s = parse_double(fields[2], line_no, "s");
    row.y = parse_double(fields[3], line_no, "y");
    if (!fields[4].empty()) row.v = parse_double(fields[4], line_no, "v");
    if (!fields[5].empty()) {
      double lane = parse_double(fields[5], line_no, "lane_id");
      int lane_i = static_cast<int>(std::llround(lane));
      if (std::abs(lane - lane_i) > 1e-9 || !geometry.contains_lane(lane_i))
        throw ParseError("line " + std::to_string(line_no) + ": bad lane_id '" +
                         fields[5] + "'");
      row.lane_id = lane_i;
    }
    by_vehicle[fields[0]].push_back(row);
    ++stats.rows;
  }

  std::vector<Trajectory> trajectories;
  for (auto& [id, rows] : by_vehicle) {
    if (rows.size() < 3) {
      ++stats.dropped_short;
      continue;
    }
    auto samples = resample(id, rows, dt, geometry);
    if (samples.size() < 3) {  // span shorter than 2*dt collapses the grid
      ++stats.dropped_short;
      continue;
    }
    trajectories.emplace_back(id, std::move(samples), dt);
  }
  return TrajectoryLog(geometry, std::move(trajectories), stats);
}

TrajectoryLog ingest_csv(const std::string& path, const LaneGeometry& geometry, double dt) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory file: " + path);
  return ingest_csv(in, geometry, dt);
}

void write_csv(const TrajectoryLog& log, std::ostream& out) {
  out << kHeader << "\n";
  char buf[512];
  for (const auto& [id, traj] : log.trajectories()) {
    for (const auto& smp : traj.samples()) {
      std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%d", id.c_str(), smp.t,
                    smp.s, smp.y, smp.v, smp.lane_id.value_or(0));
      out << buf << "\n";
    }
  }
}

void write_csv(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file: " + path);
  write_csv(log, out);
}

}  // namespace tdbm
