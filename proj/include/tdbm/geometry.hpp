#ifndef TDBM_GEOMETRY_HPP
#define TDBM_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "tdbm/errors.hpp"

namespace tdbm {

// Straight multi-lane road in a road-aligned frame: s runs along the lanes,
// y is the lateral offset. Lane centers are strictly increasing in y and
// uniformly spaced; lane index grows with y (index 0 is the rightmost lane).
class LaneGeometry {
 public:
  LaneGeometry(std::vector<double> centers, double lane_width)
      : centers_(std::move(centers)), lane_width_(lane_width) {
    validate();
  }

  // `count` lanes of width `width`, first center at `y0`.
  static LaneGeometry uniform(int count, double width, double y0 = 0.0) {
    if (count <= 0) throw ValidationError("lane count must be positive");
    std::vector<double> c(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) c[static_cast<size_t>(i)] = y0 + i * width;
    return LaneGeometry(std::move(c), width);
  }

  int lane_count() const { return static_cast<int>(centers_.size()); }
  double lane_width() const { return lane_width_; }
  const std::vector<double>& lane_centers() const { return centers_; }
  double center_of(int lane) const { return centers_.at(static_cast<size_t>(lane)); }

  bool contains_lane(int lane) const { return lane >= 0 && lane < lane_count(); }

  // Index of the lane center closest to y. Ties resolve to the lower index.
  int nearest_lane(double y) const {
    int best = 0;
    double best_d = std::abs(y - centers_[0]);
    for (int i = 1; i < lane_count(); ++i) {
      double d = std::abs(y - centers_[static_cast<size_t>(i)]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  // Road edges, half a lane beyond the outermost centers.
  double y_min() const { return centers_.front() - 0.5 * lane_width_; }
  double y_max() const { return centers_.back() + 0.5 * lane_width_; }

 private:
  void validate() const {
    if (centers_.empty()) throw ValidationError("lane geometry needs at least one lane");
    if (lane_width_ <= 0.0) throw ValidationError("lane width must be > 0");
    for (size_t i = 0; i + 1 < centers_.size(); ++i) {
      double gap = centers_[i + 1] - centers_[i];
      if (std::abs(gap - lane_width_) > 1e-9)
        throw ValidationError("lane centers must be uniformly spaced by the lane width");
    }
  }

  std::vector<double> centers_;
  double lane_width_;
};

}  // namespace tdbm

#endif  // TDBM_GEOMETRY_HPP
