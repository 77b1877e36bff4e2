#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace relspace {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

struct Aabb {
  Vec3 min;
  Vec3 max;

  Vec3 center() const { return {(min.x + max.x) / 2, (min.y + max.y) / 2, (min.z + max.z) / 2}; }
  Vec3 half_extents() const {
    return {(max.x - min.x) / 2, (max.y - min.y) / 2, (max.z - min.z) / 2};
  }
  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }
  Aabb merged(const Aabb& o) const {
    return {{std::min(min.x, o.min.x), std::min(min.y, o.min.y), std::min(min.z, o.min.z)},
            {std::max(max.x, o.max.x), std::max(max.y, o.max.y), std::max(max.z, o.max.z)}};
  }
  static Aabb from_center(const Vec3& c, const Vec3& h) { return {c - h, c + h}; }
};

Aabb bounding_box(const std::vector<Vec3>& points);

// Half extents of the axis-aligned envelope of a box with half extents h
// rotated by yaw about +z.
Vec3 yaw_envelope(const Vec3& h, double yaw);

// Minimum distance between two boxes that are axis-aligned except for a yaw
// rotation about +z. Zero when they touch or overlap.
double box_gap(const Vec3& ca, const Vec3& ha, double yaw_a, const Vec3& cb, const Vec3& hb,
               double yaw_b);

// Area of intersection of two axis-aligned rectangles given as center/half
// extents in 2D.
double rect_overlap_area(double cx0, double cy0, double hx0, double hy0, double cx1, double cy1,
                         double hx1, double hy1);

}  // namespace relspace
