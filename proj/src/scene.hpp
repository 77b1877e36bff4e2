#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "geom.hpp"
#include "rng.hpp"

namespace relspace::scene {

enum class Shape { cube, cylinder, sphere, duck, apple, pitcher, mustard, mug, cracker };
enum class SizeClass { small, medium, large };
enum class Surface { flat, irregular };
enum class Arrangement { towers, spread, intersection };

// One relation label per family for an ordered object pair.
enum class PositionRel { in, left, right, front, behind, above, below };
enum class DistanceRel { touching, not_touching, far_away };

constexpr int kShapeCount = 9;
constexpr int kSizeCount = 3;
constexpr int kSurfaceCount = 2;
constexpr int kPositionRelCount = 7;
constexpr int kDistanceRelCount = 3;

const char* to_string(Shape s);
const char* to_string(SizeClass s);
const char* to_string(Surface s);
const char* to_string(Arrangement a);
const char* to_string(PositionRel r);
const char* to_string(DistanceRel r);
bool shape_from_string(const std::string& s, Shape* out);
bool size_from_string(const std::string& s, SizeClass* out);
bool surface_from_string(const std::string& s, Surface* out);
bool arrangement_from_string(const std::string& s, Arrangement* out);
bool position_from_string(const std::string& s, PositionRel* out);
bool distance_from_string(const std::string& s, DistanceRel* out);

// Nominal half-extent scale per size class, metres.
double size_scale(SizeClass s);
// Built-in support-surface quality per shape (duck and other rounded shapes
// are irregular).
Surface shape_surface(Shape s);

struct Pose {
  Vec3 position;   // centroid, world frame: +x right, +y away from camera, +z up
  double yaw = 0;  // rotation about +z, radians
};

struct ObjectInstance {
  std::string id;
  Shape shape = Shape::cube;
  SizeClass size = SizeClass::medium;
  Surface surface = Surface::flat;
  std::string color;
  Pose pose;
  Vec3 half_extents;  // envelope of the shape's primitives

  Vec3 envelope_half_extents() const { return yaw_envelope(half_extents, pose.yaw); }
};

struct PointCloud {
  std::string object_id;
  std::vector<Vec3> points;
};

struct GroundTruth {
  std::map<std::string, bool> occluded;                 // object id -> occluded
  std::map<std::string, bool> stable;                   // structure id -> stable
  std::map<std::string, bool> object_stable;            // object id -> stable
  std::map<std::pair<std::string, std::string>, std::pair<PositionRel, DistanceRel>> relations;
};

struct Scene {
  Arrangement arrangement = Arrangement::towers;
  uint64_t seed = 0;
  int object_count = 0;
  std::vector<ObjectInstance> objects;            // sorted by id
  std::vector<std::vector<std::string>> structures;  // each stack bottom->top; singletons too
  GroundTruth truth;

  const ObjectInstance* find(const std::string& id) const;
  std::string structure_id(size_t index) const;
  // Index of the structure containing an object, or -1.
  int structure_of(const std::string& id) const;
};

// Deterministic scene construction. object_count is the stack height for
// towers (2..5) and intersection (2..4, remainder of the 5 objects goes on the
// plane); spread scenes require object_count == 5. Throws std::invalid_argument
// otherwise.
Scene generate_scene(Arrangement arrangement, uint64_t seed, int object_count);

// Surface samples of one object. Deterministic for a given rng state; callers
// that want scene-reproducible clouds should seed from (scene.seed, object id),
// which is what scene_clouds does. points_per_object must be >= 50.
PointCloud sample_point_cloud(const ObjectInstance& obj, int points_per_object, Rng& rng);

std::vector<PointCloud> scene_clouds(const Scene& s, int points_per_object);

// Exact-geometry relation label for the ordered pair (a is <rel> of b).
std::pair<PositionRel, DistanceRel> relation_oracle(const Scene& s, const std::string& a,
                                                    const std::string& b);
// Same, with each family label independently flipped to a uniformly random
// wrong value with probability noise_rate.
std::pair<PositionRel, DistanceRel> relation_oracle_noisy(const Scene& s, const std::string& a,
                                                          const std::string& b, double noise_rate,
                                                          Rng& rng);

// Relation label straight from object geometry (no scene needed).
std::pair<PositionRel, DistanceRel> relation_between(const ObjectInstance& a,
                                                     const ObjectInstance& b);

std::map<std::string, bool> occlusion_oracle(const Scene& s);
std::map<std::string, bool> stability_oracle(const Scene& s);           // per structure
std::map<std::string, bool> object_stability_oracle(const Scene& s);    // per object

}  // namespace relspace::scene
