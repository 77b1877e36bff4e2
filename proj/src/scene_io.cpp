#include "scene_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace relspace::scene {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

json vec_to_json(const Vec3& v) { return json{{"x", v.x}, {"y", v.y}, {"z", v.z}}; }

Vec3 vec_from_json(const json& j) {
  return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("z").get<double>()};
}

template <typename E>
E parse_enum(bool (*fn)(const std::string&, E*), const json& j, const char* what) {
  E value;
  if (!fn(j.get<std::string>(), &value)) {
    throw std::runtime_error(std::string("scene json: bad ") + what + ": " + j.dump());
  }
  return value;
}

}  // namespace

std::string scene_to_json(const Scene& s) {
  json j;
  j["relspace_scene"] = 1;
  j["arrangement"] = to_string(s.arrangement);
  j["seed"] = s.seed;
  j["object_count"] = s.object_count;
  j["objects"] = json::array();
  for (const auto& o : s.objects) {
    json jo;
    jo["id"] = o.id;
    jo["shape"] = to_string(o.shape);
    jo["size"] = to_string(o.size);
    jo["surface"] = to_string(o.surface);
    jo["color"] = o.color;
    jo["pose"] = json{{"x", o.pose.position.x},
                      {"y", o.pose.position.y},
                      {"z", o.pose.position.z},
                      {"yaw", o.pose.yaw}};
    jo["half_extents"] = vec_to_json(o.half_extents);
    j["objects"].push_back(jo);
  }
  j["structures"] = s.structures;
  json truth;
  truth["occluded"] = s.truth.occluded;
  truth["stable"] = s.truth.stable;
  truth["object_stable"] = s.truth.object_stable;
  json rels = json::object();
  for (const auto& [pair, rel] : s.truth.relations) {
    rels[pair.first + "|" + pair.second] = json::array({to_string(rel.first), to_string(rel.second)});
  }
  truth["relations"] = rels;
  j["ground_truth"] = truth;
  return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
  json j = json::parse(text);
  if (!j.contains("relspace_scene") || j["relspace_scene"].get<int>() != 1) {
    throw std::runtime_error("scene json: missing or unsupported relspace_scene version");
  }
  Scene s;
  s.arrangement = parse_enum(arrangement_from_string, j.at("arrangement"), "arrangement");
  s.seed = j.at("seed").get<uint64_t>();
  s.object_count = j.at("object_count").get<int>();
  for (const auto& jo : j.at("objects")) {
    ObjectInstance o;
    o.id = jo.at("id").get<std::string>();
    o.shape = parse_enum(shape_from_string, jo.at("shape"), "shape");
    o.size = parse_enum(size_from_string, jo.at("size"), "size");
    o.surface = parse_enum(surface_from_string, jo.at("surface"), "surface");
    o.color = jo.at("color").get<std::string>();
    const auto& jp = jo.at("pose");
    o.pose.position = {jp.at("x").get<double>(), jp.at("y").get<double>(), jp.at("z").get<double>()};
    o.pose.yaw = jp.at("yaw").get<double>();
    o.half_extents = vec_from_json(jo.at("half_extents"));
    s.objects.push_back(o);
  }
  s.structures = j.at("structures").get<std::vector<std::vector<std::string>>>();
  const auto& truth = j.at("ground_truth");
  s.truth.occluded = truth.at("occluded").get<std::map<std::string, bool>>();
  s.truth.stable = truth.at("stable").get<std::map<std::string, bool>>();
  if (truth.contains("object_stable")) {
    s.truth.object_stable = truth.at("object_stable").get<std::map<std::string, bool>>();
  }
  for (const auto& [key, value] : truth.at("relations").items()) {
    auto bar = key.find('|');
    if (bar == std::string::npos) throw std::runtime_error("scene json: bad relation key " + key);
    PositionRel pos;
    DistanceRel dist;
    if (!position_from_string(value.at(0).get<std::string>(), &pos) ||
        !distance_from_string(value.at(1).get<std::string>(), &dist)) {
      throw std::runtime_error("scene json: bad relation value for " + key);
    }
    s.truth.relations[{key.substr(0, bar), key.substr(bar + 1)}] = {pos, dist};
  }
  return s;
}

void save_scene(const Scene& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << scene_to_json(s);
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return scene_from_json(text);
}

void save_scene_dir(const std::vector<Scene>& scenes, const std::string& dir) {
  fs::create_directories(dir);
  char name[32];
  for (size_t i = 0; i < scenes.size(); ++i) {
    std::snprintf(name, sizeof(name), "scene_%04zu.json", i);
    save_scene(scenes[i], (fs::path(dir) / name).string());
  }
}

std::vector<Scene> load_scene_dir(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  std::vector<Scene> scenes;
  for (const auto& f : files) scenes.push_back(load_scene(f));
  if (scenes.empty()) throw std::runtime_error("no scene json files in " + dir);
  return scenes;
}

}  // namespace relspace::scene
