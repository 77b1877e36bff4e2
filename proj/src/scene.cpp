#include "scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relspace::scene {

namespace {

const char* kShapeNames[] = {"cube",    "cylinder", "sphere", "duck", "apple",
                             "pitcher", "mustard",  "mug",    "cracker"};
const char* kSizeNames[] = {"small", "medium", "large"};
const char* kSurfaceNames[] = {"flat", "irregular"};
const char* kArrangementNames[] = {"towers", "spread", "intersection"};
const char* kPositionNames[] = {"in", "left", "right", "front", "behind", "above", "below"};
const char* kDistanceNames[] = {"touching", "not_touching", "far"};
const char* kColors[] = {"red", "green", "blue", "yellow", "white", "black", "orange", "purple"};

template <typename E, size_t N>
bool enum_from_string(const char* const (&names)[N], const std::string& s, E* out) {
  for (size_t i = 0; i < N; ++i) {
    if (s == names[i]) {
      *out = static_cast<E>(i);
      return true;
    }
  }
  return false;
}

}  // namespace

const char* to_string(Shape s) { return kShapeNames[static_cast<int>(s)]; }
const char* to_string(SizeClass s) { return kSizeNames[static_cast<int>(s)]; }
const char* to_string(Surface s) { return kSurfaceNames[static_cast<int>(s)]; }
const char* to_string(Arrangement a) { return kArrangementNames[static_cast<int>(a)]; }
const char* to_string(PositionRel r) { return kPositionNames[static_cast<int>(r)]; }
const char* to_string(DistanceRel r) { return kDistanceNames[static_cast<int>(r)]; }

bool shape_from_string(const std::string& s, Shape* out) { return enum_from_string(kShapeNames, s, out); }
bool size_from_string(const std::string& s, SizeClass* out) { return enum_from_string(kSizeNames, s, out); }
bool surface_from_string(const std::string& s, Surface* out) { return enum_from_string(kSurfaceNames, s, out); }
bool arrangement_from_string(const std::string& s, Arrangement* out) { return enum_from_string(kArrangementNames, s, out); }
bool position_from_string(const std::string& s, PositionRel* out) { return enum_from_string(kPositionNames, s, out); }
bool distance_from_string(const std::string& s, DistanceRel* out) { return enum_from_string(kDistanceNames, s, out); }

double size_scale(SizeClass s) {
  switch (s) {
    case SizeClass::small: return 0.03;
    case SizeClass::medium: return 0.06;
    case SizeClass::large: return 0.10;
  }
  return 0.06;
}

Surface shape_surface(Shape s) {
  switch (s) {
    case Shape::cube:
    case Shape::cylinder:
    case Shape::mustard:
    case Shape::mug:
    case Shape::cracker: return Surface::flat;
    case Shape::sphere:
    case Shape::duck:
    case Shape::apple:
    case Shape::pitcher: return Surface::irregular;
  }
  return Surface::flat;
}

// ---------------------------------------------------------------------------
// Shape primitives. Every shape is a union of at most three primitives in the
// object's local frame; the object's half_extents are the envelope of the
// union, and the object rests on the envelope's bottom face.

namespace {

enum class PrimKind { box, cylinder, sphere };

struct Primitive {
  PrimKind kind;
  Vec3 center;  // local frame
  Vec3 dims;    // box: half extents; cylinder: {r, r, half height}; sphere: {r,r,r}
};

struct ShapeModel {
  std::vector<Primitive> prims;
  Vec3 envelope;
};

ShapeModel shape_model(Shape shape, SizeClass size) {
  double s = size_scale(size);
  ShapeModel m;
  switch (shape) {
    case Shape::cube:
      m.prims = {{PrimKind::box, {0, 0, 0}, {s, s, s}}};
      m.envelope = {s, s, s};
      break;
    case Shape::cylinder:
      m.prims = {{PrimKind::cylinder, {0, 0, 0}, {0.8 * s, 0.8 * s, s}}};
      m.envelope = {0.8 * s, 0.8 * s, s};
      break;
    case Shape::sphere:
      m.prims = {{PrimKind::sphere, {0, 0, 0}, {s, s, s}}};
      m.envelope = {s, s, s};
      break;
    case Shape::duck:
      m.prims = {{PrimKind::box, {-0.1 * s, 0, -0.45 * s}, {0.9 * s, 0.7 * s, 0.55 * s}},
                 {PrimKind::sphere, {0.55 * s, 0, 0.55 * s}, {0.45 * s, 0.45 * s, 0.45 * s}}};
      m.envelope = {s, 0.7 * s, s};
      break;
    case Shape::apple:
      m.prims = {{PrimKind::sphere, {0, 0, 0}, {0.9 * s, 0.9 * s, 0.9 * s}}};
      m.envelope = {0.9 * s, 0.9 * s, 0.9 * s};
      break;
    case Shape::pitcher:
      m.prims = {{PrimKind::cylinder, {-0.15 * s, 0, 0}, {0.7 * s, 0.7 * s, s}},
                 {PrimKind::box, {0.7 * s, 0, 0}, {0.3 * s, 0.1 * s, 0.5 * s}}};
      m.envelope = {s, 0.7 * s, s};
      break;
    case Shape::mustard:
      m.prims = {{PrimKind::box, {0, 0, 0}, {0.45 * s, 0.25 * s, s}}};
      m.envelope = {0.45 * s, 0.25 * s, s};
      break;
    case Shape::mug:
      m.prims = {{PrimKind::cylinder, {-0.15 * s, 0, 0}, {0.7 * s, 0.7 * s, 0.6 * s}},
                 {PrimKind::box, {0.7 * s, 0, 0}, {0.3 * s, 0.1 * s, 0.35 * s}}};
      m.envelope = {s, 0.7 * s, 0.6 * s};
      break;
    case Shape::cracker:
      m.prims = {{PrimKind::box, {0, 0, 0}, {0.8 * s, 0.3 * s, s}}};
      m.envelope = {0.8 * s, 0.3 * s, s};
      break;
  }
  return m;
}

double primitive_area(const Primitive& p) {
  const double pi = 3.14159265358979323846;
  switch (p.kind) {
    case PrimKind::box:
      return 8 * (p.dims.x * p.dims.y + p.dims.x * p.dims.z + p.dims.y * p.dims.z);
    case PrimKind::cylinder:
      return 2 * pi * p.dims.x * (2 * p.dims.z) + 2 * pi * p.dims.x * p.dims.x;
    case PrimKind::sphere:
      return 4 * pi * p.dims.x * p.dims.x;
  }
  return 0;
}

// Surface point plus outward normal, local frame.
void sample_primitive(const Primitive& p, Rng& rng, Vec3* point, Vec3* normal) {
  const double pi = 3.14159265358979323846;
  switch (p.kind) {
    case PrimKind::box: {
      double ax = p.dims.y * p.dims.z, ay = p.dims.x * p.dims.z, az = p.dims.x * p.dims.y;
      double pick = rng.uniform() * (ax + ay + az);
      double u = rng.uniform(-1, 1), v = rng.uniform(-1, 1);
      double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      Vec3 q, n{0, 0, 0};
      if (pick < ax) {
        q = {sign * p.dims.x, u * p.dims.y, v * p.dims.z};
        n.x = sign;
      } else if (pick < ax + ay) {
        q = {u * p.dims.x, sign * p.dims.y, v * p.dims.z};
        n.y = sign;
      } else {
        q = {u * p.dims.x, v * p.dims.y, sign * p.dims.z};
        n.z = sign;
      }
      *point = p.center + q;
      *normal = n;
      break;
    }
    case PrimKind::cylinder: {
      double r = p.dims.x, hz = p.dims.z;
      double side = 2 * pi * r * 2 * hz, cap = pi * r * r;
      double pick = rng.uniform() * (side + 2 * cap);
      if (pick < side) {
        double a = rng.uniform(0, 2 * pi);
        *point = p.center + Vec3{r * std::cos(a), r * std::sin(a), rng.uniform(-hz, hz)};
        *normal = {std::cos(a), std::sin(a), 0};
      } else {
        double sign = pick < side + cap ? 1.0 : -1.0;
        double rr = r * std::sqrt(rng.uniform());
        double a = rng.uniform(0, 2 * pi);
        *point = p.center + Vec3{rr * std::cos(a), rr * std::sin(a), sign * hz};
        *normal = {0, 0, sign};
      }
      break;
    }
    case PrimKind::sphere: {
      Vec3 d{rng.normal(), rng.normal(), rng.normal()};
      double n = d.norm();
      if (n < 1e-12) d = {1, 0, 0}, n = 1;
      d = d * (1.0 / n);
      *point = p.center + d * p.dims.x;
      *normal = d;
      break;
    }
  }
}

Vec3 rotate_yaw(const Vec3& v, double yaw) {
  double c = std::cos(yaw), s = std::sin(yaw);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

}  // namespace

const ObjectInstance* Scene::find(const std::string& id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

std::string Scene::structure_id(size_t index) const { return "s" + std::to_string(index); }

int Scene::structure_of(const std::string& id) const {
  for (size_t i = 0; i < structures.size(); ++i) {
    for (const auto& m : structures[i]) {
      if (m == id) return static_cast<int>(i);
    }
  }
  return -1;
}

PointCloud sample_point_cloud(const ObjectInstance& obj, int points_per_object, Rng& rng) {
  if (points_per_object < 50) {
    throw std::invalid_argument("points_per_object must be >= 50");
  }
  ShapeModel model = shape_model(obj.shape, obj.size);
  double total_area = 0;
  for (const auto& p : model.prims) total_area += primitive_area(p);

  PointCloud cloud;
  cloud.object_id = obj.id;
  cloud.points.reserve(points_per_object);
  for (int i = 0; i < points_per_object; ++i) {
    double pick = rng.uniform() * total_area;
    size_t idx = 0;
    double acc = 0;
    for (size_t k = 0; k < model.prims.size(); ++k) {
      acc += primitive_area(model.prims[k]);
      if (pick < acc || k + 1 == model.prims.size()) {
        idx = k;
        break;
      }
    }
    Vec3 local, normal;
    sample_primitive(model.prims[idx], rng, &local, &normal);
    // Sensor-style jitter along the normal, well inside the 1 mm envelope bound.
    local = local + normal * rng.uniform(-0.0005, 0.0005);
    local.x = std::clamp(local.x, -model.envelope.x - 0.0009, model.envelope.x + 0.0009);
    local.y = std::clamp(local.y, -model.envelope.y - 0.0009, model.envelope.y + 0.0009);
    local.z = std::clamp(local.z, -model.envelope.z - 0.0009, model.envelope.z + 0.0009);
    cloud.points.push_back(obj.pose.position + rotate_yaw(local, obj.pose.yaw));
  }
  return cloud;
}

std::vector<PointCloud> scene_clouds(const Scene& s, int points_per_object) {
  std::vector<PointCloud> out;
  out.reserve(s.objects.size());
  for (const auto& obj : s.objects) {
    Rng rng(mix_seed(s.seed, obj.id));
    out.push_back(sample_point_cloud(obj, points_per_object, rng));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Oracles

std::pair<PositionRel, DistanceRel> relation_between(const ObjectInstance& a,
                                                     const ObjectInstance& b) {
  Vec3 ea = a.envelope_half_extents();
  Vec3 eb = b.envelope_half_extents();
  Vec3 d = a.pose.position - b.pose.position;

  PositionRel pos;
  if (std::fabs(d.x) <= eb.x && std::fabs(d.y) <= eb.y && std::fabs(d.z) <= eb.z) {
    pos = PositionRel::in;
  } else {
    // Pyramids of the combined box: apex at the reference centre, faces through
    // the faces of the box inflated by the target's extents. Scaling by the
    // summed extents keeps the label symmetric for the swapped pair.
    double sx = d.x / (ea.x + eb.x);
    double sy = d.y / (ea.y + eb.y);
    double sz = d.z / (ea.z + eb.z);
    double m = std::max({std::fabs(sx), std::fabs(sy), std::fabs(sz)});
    if (sz > 0 && sz >= m) pos = PositionRel::above;
    else if (sz < 0 && -sz >= m) pos = PositionRel::below;
    else if (sx < 0 && -sx >= m) pos = PositionRel::left;
    else if (sx > 0 && sx >= m) pos = PositionRel::right;
    else if (sy < 0 && -sy >= m) pos = PositionRel::front;
    else pos = PositionRel::behind;
  }

  double gap = box_gap(a.pose.position, a.half_extents, a.pose.yaw, b.pose.position,
                       b.half_extents, b.pose.yaw);
  DistanceRel dist;
  if (gap <= 0.01) dist = DistanceRel::touching;
  else if (gap >= 1.0) dist = DistanceRel::far_away;
  else dist = DistanceRel::not_touching;
  return {pos, dist};
}

std::pair<PositionRel, DistanceRel> relation_oracle(const Scene& s, const std::string& a,
                                                    const std::string& b) {
  const ObjectInstance* oa = s.find(a);
  const ObjectInstance* ob = s.find(b);
  if (!oa || !ob || a == b) throw std::invalid_argument("relation_oracle: bad object pair");
  return relation_between(*oa, *ob);
}

std::pair<PositionRel, DistanceRel> relation_oracle_noisy(const Scene& s, const std::string& a,
                                                          const std::string& b, double noise_rate,
                                                          Rng& rng) {
  auto rel = relation_oracle(s, a, b);
  if (noise_rate > 0 && rng.uniform() < noise_rate) {
    int cur = static_cast<int>(rel.first);
    int pick = rng.next_int(0, kPositionRelCount - 2);
    if (pick >= cur) ++pick;
    rel.first = static_cast<PositionRel>(pick);
  }
  if (noise_rate > 0 && rng.uniform() < noise_rate) {
    int cur = static_cast<int>(rel.second);
    int pick = rng.next_int(0, kDistanceRelCount - 2);
    if (pick >= cur) ++pick;
    rel.second = static_cast<DistanceRel>(pick);
  }
  return rel;
}

std::map<std::string, bool> occlusion_oracle(const Scene& s) {
  std::map<std::string, bool> out;
  for (const auto& target : s.objects) {
    Vec3 et = target.envelope_half_extents();
    double area = 4 * et.x * et.z;
    bool occluded = false;
    for (const auto& other : s.objects) {
      if (other.id == target.id) continue;
      if (other.pose.position.y >= target.pose.position.y) continue;  // not strictly closer
      Vec3 eo = other.envelope_half_extents();
      double overlap =
          rect_overlap_area(target.pose.position.x, target.pose.position.z, et.x, et.z,
                            other.pose.position.x, other.pose.position.z, eo.x, eo.z);
      if (area > 0 && overlap / area > 0.05) {
        occluded = true;
        break;
      }
    }
    out[target.id] = occluded;
  }
  return out;
}

namespace {

double envelope_volume(const ObjectInstance& o) {
  return 8 * o.half_extents.x * o.half_extents.y * o.half_extents.z;
}

}  // namespace

std::map<std::string, bool> object_stability_oracle(const Scene& s) {
  std::map<std::string, bool> out;
  for (const auto& o : s.objects) out[o.id] = true;
  for (const auto& stack : s.structures) {
    for (size_t k = 1; k < stack.size(); ++k) {
      const ObjectInstance* supporter = s.find(stack[k - 1]);
      // Combined centre of mass of the supported object and everything above it.
      Vec3 com{0, 0, 0};
      double mass = 0;
      for (size_t j = k; j < stack.size(); ++j) {
        const ObjectInstance* m = s.find(stack[j]);
        double v = envelope_volume(*m);
        com = com + m->pose.position * v;
        mass += v;
      }
      com = com * (1.0 / mass);
      // Footprint of the supporter's top face, inset by 10% per side.
      Vec3 d = com - supporter->pose.position;
      double c = std::cos(supporter->pose.yaw), sn = std::sin(supporter->pose.yaw);
      double lx = c * d.x + sn * d.y;
      double ly = -sn * d.x + c * d.y;
      bool inside = std::fabs(lx) <= 0.9 * supporter->half_extents.x &&
                    std::fabs(ly) <= 0.9 * supporter->half_extents.y;
      bool ok = inside && supporter->surface == Surface::flat;
      if (!ok) out[stack[k]] = false;
    }
    // An object resting on an unstable one is unstable too: the whole
    // substructure above the first violation goes.
    bool falling = false;
    for (const auto& id : stack) {
      falling = falling || !out[id];
      if (falling) out[id] = false;
    }
  }
  return out;
}

std::map<std::string, bool> stability_oracle(const Scene& s) {
  auto per_object = object_stability_oracle(s);
  std::map<std::string, bool> out;
  for (size_t i = 0; i < s.structures.size(); ++i) {
    bool stable = true;
    for (const auto& id : s.structures[i]) {
      if (!per_object[id]) stable = false;
    }
    out[s.structure_id(i)] = stable;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generation

namespace {

ObjectInstance make_object(int index, Rng& rng) {
  ObjectInstance o;
  o.id = "obj" + std::to_string(index);
  o.shape = static_cast<Shape>(rng.next_int(0, kShapeCount - 1));
  o.size = static_cast<SizeClass>(rng.next_int(0, kSizeCount - 1));
  o.surface = shape_surface(o.shape);
  o.color = kColors[rng.next_int(0, 7)];
  o.half_extents = shape_model(o.shape, o.size).envelope;
  o.pose.yaw = rng.uniform(-3.14159265358979, 3.14159265358979);
  return o;
}

// Stack `members` (already created) at base (x, y), adding randomized lateral
// offsets so that both stable and unstable towers occur.
void place_stack(std::vector<ObjectInstance*>& members, double x, double y, Rng& rng) {
  double top = 0;
  double cx = x, cy = y;
  for (size_t k = 0; k < members.size(); ++k) {
    ObjectInstance* o = members[k];
    if (k > 0) {
      const ObjectInstance* sup = members[k - 1];
      double mx = std::max(sup->half_extents.x, o->half_extents.x);
      double my = std::max(sup->half_extents.y, o->half_extents.y);
      cx += rng.uniform(-0.75 * mx, 0.75 * mx);
      cy += rng.uniform(-0.75 * my, 0.75 * my);
    }
    o->pose.position = {cx, cy, top + o->half_extents.z};
    top += 2 * o->half_extents.z;
  }
}

// Drop an object on the plane, avoiding interpenetration with the ones already
// placed; occasionally snugs it against a neighbour so touching pairs occur.
void place_on_plane(ObjectInstance* o, const std::vector<ObjectInstance*>& placed, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    bool snug = !placed.empty() && rng.uniform() < 0.25;
    double x, y;
    if (snug) {
      const ObjectInstance* n = placed[rng.next_int(0, static_cast<int>(placed.size()) - 1)];
      Vec3 en = n->envelope_half_extents();
      Vec3 eo = o->envelope_half_extents();
      double gap = rng.uniform(0.001, 0.008);
      int axis = rng.next_int(0, 1);
      double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
      x = n->pose.position.x + (axis == 0 ? side * (en.x + eo.x + gap) : rng.uniform(-0.02, 0.02));
      y = n->pose.position.y + (axis == 1 ? side * (en.y + eo.y + gap) : rng.uniform(-0.02, 0.02));
    } else {
      x = rng.uniform(-0.35, 0.35);
      y = rng.uniform(0.20, 0.80);
    }
    o->pose.position = {x, y, o->half_extents.z};
    bool clash = false;
    for (const ObjectInstance* p : placed) {
      double gap = box_gap(o->pose.position, o->half_extents, o->pose.yaw, p->pose.position,
                           p->half_extents, p->pose.yaw);
      if (gap < (snug ? 0.0005 : 0.02)) {
        clash = true;
        break;
      }
    }
    if (!clash) return;
  }
  // Fall back to a spot far along +y; keeps generation total.
  o->pose.position = {rng.uniform(-0.35, 0.35), 0.9 + 0.1 * static_cast<double>(placed.size()),
                      o->half_extents.z};
}

}  // namespace

Scene generate_scene(Arrangement arrangement, uint64_t seed, int object_count) {
  Scene s;
  s.arrangement = arrangement;
  s.seed = seed;
  s.object_count = object_count;
  Rng rng(mix_seed(seed, to_string(arrangement), static_cast<uint64_t>(object_count)));

  switch (arrangement) {
    case Arrangement::towers: {
      if (object_count < 2 || object_count > 5) {
        throw std::invalid_argument("towers require 2..5 objects");
      }
      for (int i = 0; i < object_count; ++i) s.objects.push_back(make_object(i, rng));
      std::vector<ObjectInstance*> members;
      std::vector<std::string> ids;
      for (auto& o : s.objects) {
        members.push_back(&o);
        ids.push_back(o.id);
      }
      place_stack(members, rng.uniform(-0.15, 0.15), rng.uniform(0.3, 0.6), rng);
      s.structures.push_back(ids);
      break;
    }
    case Arrangement::spread: {
      if (object_count != 5) throw std::invalid_argument("spread requires exactly 5 objects");
      std::vector<ObjectInstance*> placed;
      for (int i = 0; i < 5; ++i) {
        s.objects.push_back(make_object(i, rng));
      }
      for (auto& o : s.objects) {
        place_on_plane(&o, placed, rng);
        placed.push_back(&o);
        s.structures.push_back({o.id});
      }
      break;
    }
    case Arrangement::intersection: {
      if (object_count < 2 || object_count > 4) {
        throw std::invalid_argument("intersection stacks 2..4 of its 5 objects");
      }
      for (int i = 0; i < 5; ++i) s.objects.push_back(make_object(i, rng));
      std::vector<ObjectInstance*> members;
      std::vector<std::string> ids;
      for (int i = 0; i < object_count; ++i) {
        members.push_back(&s.objects[i]);
        ids.push_back(s.objects[i].id);
      }
      place_stack(members, rng.uniform(-0.15, 0.15), rng.uniform(0.3, 0.6), rng);
      s.structures.push_back(ids);
      std::vector<ObjectInstance*> placed = members;
      for (int i = object_count; i < 5; ++i) {
        place_on_plane(&s.objects[i], placed, rng);
        placed.push_back(&s.objects[i]);
        s.structures.push_back({s.objects[i].id});
      }
      break;
    }
  }

  s.truth.occluded = occlusion_oracle(s);
  s.truth.stable = stability_oracle(s);
  s.truth.object_stable = object_stability_oracle(s);
  for (const auto& a : s.objects) {
    for (const auto& b : s.objects) {
      if (a.id == b.id) continue;
      s.truth.relations[{a.id, b.id}] = relation_between(a, b);
    }
  }
  return s;
}

}  // namespace relspace::scene
