#include "geom.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace relspace {

Aabb bounding_box(const std::vector<Vec3>& points) {
  Aabb b;
  const double inf = std::numeric_limits<double>::infinity();
  b.min = {inf, inf, inf};
  b.max = {-inf, -inf, -inf};
  for (const Vec3& p : points) {
    b.min.x = std::min(b.min.x, p.x);
    b.min.y = std::min(b.min.y, p.y);
    b.min.z = std::min(b.min.z, p.z);
    b.max.x = std::max(b.max.x, p.x);
    b.max.y = std::max(b.max.y, p.y);
    b.max.z = std::max(b.max.z, p.z);
  }
  return b;
}

Vec3 yaw_envelope(const Vec3& h, double yaw) {
  double c = std::fabs(std::cos(yaw));
  double s = std::fabs(std::sin(yaw));
  return {h.x * c + h.y * s, h.x * s + h.y * c, h.z};
}

namespace {

struct Pt2 {
  double x, y;
};

double seg_point_dist2(Pt2 a, Pt2 b, Pt2 p) {
  double vx = b.x - a.x, vy = b.y - a.y;
  double wx = p.x - a.x, wy = p.y - a.y;
  double vv = vx * vx + vy * vy;
  double t = vv > 0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
  double dx = wx - t * vx, dy = wy - t * vy;
  return dx * dx + dy * dy;
}

double seg_seg_dist2(Pt2 a, Pt2 b, Pt2 c, Pt2 d) {
  auto orient = [](Pt2 p, Pt2 q, Pt2 r) {
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
  };
  double o1 = orient(a, b, c), o2 = orient(a, b, d);
  double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0))) return 0.0;  // proper crossing
  double m = seg_point_dist2(a, b, c);
  m = std::min(m, seg_point_dist2(a, b, d));
  m = std::min(m, seg_point_dist2(c, d, a));
  m = std::min(m, seg_point_dist2(c, d, b));
  return m;
}

std::array<Pt2, 4> rect_corners(double cx, double cy, double hx, double hy, double yaw) {
  double c = std::cos(yaw), s = std::sin(yaw);
  std::array<Pt2, 4> out;
  const double sx[4] = {+1, +1, -1, -1};
  const double sy[4] = {+1, -1, -1, +1};
  for (int i = 0; i < 4; ++i) {
    double lx = sx[i] * hx, ly = sy[i] * hy;
    out[i] = {cx + c * lx - s * ly, cy + s * lx + c * ly};
  }
  return out;
}

bool point_in_rect(Pt2 p, double cx, double cy, double hx, double hy, double yaw) {
  double c = std::cos(yaw), s = std::sin(yaw);
  double dx = p.x - cx, dy = p.y - cy;
  double lx = c * dx + s * dy;
  double ly = -s * dx + c * dy;
  return std::fabs(lx) <= hx && std::fabs(ly) <= hy;
}

// Distance between two yawed rectangles in the plane.
double rect_rect_dist(double cx0, double cy0, double hx0, double hy0, double y0, double cx1,
                      double cy1, double hx1, double hy1, double y1) {
  auto r0 = rect_corners(cx0, cy0, hx0, hy0, y0);
  auto r1 = rect_corners(cx1, cy1, hx1, hy1, y1);
  if (point_in_rect(r0[0], cx1, cy1, hx1, hy1, y1)) return 0.0;
  if (point_in_rect(r1[0], cx0, cy0, hx0, hy0, y0)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, seg_seg_dist2(r0[i], r0[(i + 1) % 4], r1[j], r1[(j + 1) % 4]));
    }
  }
  return std::sqrt(best);
}

}  // namespace

double box_gap(const Vec3& ca, const Vec3& ha, double yaw_a, const Vec3& cb, const Vec3& hb,
               double yaw_b) {
  double dz = 0.0;
  double lo = std::max(ca.z - ha.z, cb.z - hb.z);
  double hi = std::min(ca.z + ha.z, cb.z + hb.z);
  if (lo > hi) dz = lo - hi;
  double dxy = rect_rect_dist(ca.x, ca.y, ha.x, ha.y, yaw_a, cb.x, cb.y, hb.x, hb.y, yaw_b);
  return std::sqrt(dz * dz + dxy * dxy);
}

double rect_overlap_area(double cx0, double cy0, double hx0, double hy0, double cx1, double cy1,
                         double hx1, double hy1) {
  double w = std::min(cx0 + hx0, cx1 + hx1) - std::max(cx0 - hx0, cx1 - hx1);
  double h = std::min(cy0 + hy0, cy1 + hy1) - std::max(cy0 - hy0, cy1 - hy1);
  if (w <= 0 || h <= 0) return 0.0;
  return w * h;
}

}  // namespace relspace
