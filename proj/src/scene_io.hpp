#pragma once

#include <string>
#include <vector>

#include "scene.hpp"

namespace relspace::scene {

std::string scene_to_json(const Scene& s);
Scene scene_from_json(const std::string& text);

void save_scene(const Scene& s, const std::string& path);
Scene load_scene(const std::string& path);

// Writes scene_0000.json ... into dir (created if missing).
void save_scene_dir(const std::vector<Scene>& scenes, const std::string& dir);
std::vector<Scene> load_scene_dir(const std::string& dir);

}  // namespace relspace::scene
