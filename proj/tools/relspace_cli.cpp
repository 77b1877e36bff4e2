// Command-line front end over the relspace C API.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relspace/relspace.h"

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  std::ofstream f(path);
  if (!f) throw CLI::ValidationError("cannot write " + path);
  f << text;
}

// Prints to stdout unless --out was given.
void deliver(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    fputs(text.c_str(), stdout);
  } else {
    write_file(out_path, text);
  }
}

struct ApiError {
  rs_status status;
  std::string message;
};

void check(rs_status st) {
  if (st != RS_OK) throw ApiError{st, rs_last_error()};
}

// Owning wrappers so error paths do not leak handles.
using SceneHandle = std::unique_ptr<rs_scene, decltype(&rs_scene_free)>;
using ProgramHandle = std::unique_ptr<rs_program, decltype(&rs_program_free)>;
using StringHandle = std::unique_ptr<char, decltype(&rs_string_free)>;

SceneHandle make_scene(const std::string& arrangement, uint64_t seed, int objects) {
  rs_scene* s = nullptr;
  check(rs_scene_generate(arrangement.c_str(), seed, objects, &s));
  return {s, rs_scene_free};
}

SceneHandle load_scene(const std::string& path) {
  rs_scene* s = nullptr;
  check(rs_scene_parse(read_file(path).c_str(), &s));
  return {s, rs_scene_free};
}

std::vector<SceneHandle> load_scenes(const std::string& path) {
  std::vector<SceneHandle> scenes;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) scenes.push_back(load_scene(f.string()));
  } else {
    scenes.push_back(load_scene(path));
  }
  if (scenes.empty()) throw CLI::ValidationError("no scene files under " + path);
  return scenes;
}

std::vector<const rs_scene*> raw(const std::vector<SceneHandle>& scenes) {
  std::vector<const rs_scene*> out;
  for (const auto& s : scenes) out.push_back(s.get());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relspace: scene grounding, non-monotonic reasoning, and axiom learning"};
  app.require_subcommand(1);
  app.fallthrough();

  uint64_t seed = 42;
  std::string config_path;
  std::string out_path;
  app.add_option("--seed", seed, "master random seed")->capture_default_str();
  app.add_option("--config", config_path, "key=value config file for experiments");
  app.add_option("--out", out_path, "output file or directory (default: stdout)");

  // gen-scenes
  auto* gen = app.add_subcommand("gen-scenes", "generate synthetic scenes as JSON files");
  std::string arrangement = "towers";
  int count = 10;
  int objects = 3;
  gen->add_option("--arrangement", arrangement, "towers | spread | intersection")
      ->capture_default_str();
  gen->add_option("--count", count, "number of scenes")->capture_default_str();
  gen->add_option("--objects", objects, "objects per scene (stack height)")
      ->capture_default_str();

  // ground
  auto* ground = app.add_subcommand("ground", "extract relation and attribute facts from a scene");
  std::string scene_path, store_path, kb_out;
  int points = 200;
  ground->add_option("--scene", scene_path, "scene JSON file")->required();
  ground->add_option("--points", points, "point-cloud samples per object")->capture_default_str();
  ground->add_option("--store", store_path, "visual-word store for learned grounding");
  ground->add_option("--emit-kb", kb_out, "also write the scene's default knowledge base here");

  // reason
  auto* reason = app.add_subcommand("reason", "cautious task labels from a program plus facts");
  std::string program_path, facts_path, task = "stability";
  bool models = false;
  reason->add_option("--program", program_path, "knowledge base (.lp)")->required();
  reason->add_option("--facts", facts_path, "fact file from the ground subcommand");
  reason->add_option("--task", task, "stability | occlusion")->capture_default_str();
  reason->add_flag("--models", models, "print every answer set instead of task labels");

  // train
  auto* train = app.add_subcommand("train", "train the classifier on reasoning failures");
  std::string scenes_path, model_path = "model.txt";
  int epochs = 200;
  double rate = 0.05;
  train->add_option("--scenes", scenes_path, "scene JSON file or directory")->required();
  train->add_option("--model", model_path, "where to save the model")->capture_default_str();
  train->add_option("--epochs", epochs, "training epochs")->capture_default_str();
  train->add_option("--rate", rate, "learning rate")->capture_default_str();

  // induce
  auto* induce = app.add_subcommand("induce", "learn candidate axioms from labeled scenes");
  std::string induce_scenes, induce_task = "both";
  double th1 = 0, th2 = 0, th3 = 0;
  induce->add_option("--scenes", induce_scenes, "scene JSON file or directory")->required();
  induce->add_option("--task", induce_task, "stability | occlusion | both")
      ->capture_default_str();
  induce->add_option("--th1", th1, "leaf purity / agreement threshold (0 = default 0.95)");
  induce->add_option("--th2", th2, "support fraction (0 = default 0.05)");
  induce->add_option("--th3", th3, "ensemble consistency (0 = default 0.40)");

  // plan
  auto* plan = app.add_subcommand("plan", "minimal plans for an on(object, location) goal");
  std::string plan_scene, goal_object, goal_location, axioms_path;
  int horizon = 8;
  plan->add_option("--scene", plan_scene, "scene JSON file")->required();
  plan->add_option("--object", goal_object, "object to move")->required();
  plan->add_option("--location", goal_location, "destination object id or 'table'")->required();
  plan->add_option("--axioms", axioms_path, "stability axioms (.lp) the planner must respect");
  plan->add_option("--horizon", horizon, "maximum plan length")->capture_default_str();

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run an evaluation suite and write CSVs");
  std::string experiment_name;
  experiment
      ->add_option("name", experiment_name, "grounding | attention | induction | planning | all")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      std::string dir = out_path.empty() ? "scenes" : out_path;
      fs::create_directories(dir);
      for (int i = 0; i < count; ++i) {
        SceneHandle s = make_scene(arrangement, seed + static_cast<uint64_t>(i), objects);
        char* json = nullptr;
        check(rs_scene_json(s.get(), &json));
        StringHandle guard{json, rs_string_free};
        char name[32];
        std::snprintf(name, sizeof(name), "scene_%04d.json", i);
        write_file((fs::path(dir) / name).string(), json);
      }
      std::printf("wrote %d scenes to %s\n", count, dir.c_str());
    } else if (*ground) {
      SceneHandle s = load_scene(scene_path);
      char* facts = nullptr;
      check(rs_scene_facts(s.get(), points, store_path.empty() ? nullptr : store_path.c_str(),
                           &facts));
      StringHandle guard{facts, rs_string_free};
      deliver(out_path, facts);
      if (!kb_out.empty()) {
        char* kb = nullptr;
        check(rs_scene_kb(s.get(), &kb));
        StringHandle kb_guard{kb, rs_string_free};
        write_file(kb_out, kb);
      }
    } else if (*reason) {
      std::string kb = read_file(program_path);
      std::string facts = facts_path.empty() ? "" : read_file(facts_path);
      char* result = nullptr;
      if (models) {
        rs_program* p = nullptr;
        check(rs_program_parse((kb + "\n" + facts).c_str(), &p));
        ProgramHandle p_guard{p, rs_program_free};
        check(rs_answer_sets(p, &result));
      } else {
        check(rs_reason(kb.c_str(), facts.c_str(), task.c_str(), &result));
      }
      StringHandle guard{result, rs_string_free};
      deliver(out_path, result);
    } else if (*train) {
      auto scenes = load_scenes(scenes_path);
      auto ptrs = raw(scenes);
      char* summary = nullptr;
      check(rs_train(ptrs.data(), ptrs.size(), seed, epochs, rate, model_path.c_str(),
                     &summary));
      StringHandle guard{summary, rs_string_free};
      std::printf("%s model %s\n", summary, model_path.c_str());
    } else if (*induce) {
      auto scenes = load_scenes(induce_scenes);
      auto ptrs = raw(scenes);
      char* axioms = nullptr;
      check(rs_induce(ptrs.data(), ptrs.size(), induce_task.c_str(), th1, th2, th3, seed,
                      &axioms));
      StringHandle guard{axioms, rs_string_free};
      deliver(out_path, axioms);
    } else if (*plan) {
      SceneHandle s = load_scene(plan_scene);
      std::string axioms = axioms_path.empty() ? "" : read_file(axioms_path);
      char* result = nullptr;
      check(rs_plan(s.get(), goal_object.c_str(), goal_location.c_str(),
                    axioms.empty() ? nullptr : axioms.c_str(), horizon, &result));
      StringHandle guard{result, rs_string_free};
      deliver(out_path, result);
    } else if (*experiment) {
      std::string config = config_path.empty() ? "" : read_file(config_path);
      std::string dir = out_path.empty() ? "reports" : out_path;
      char* summary = nullptr;
      check(rs_experiment(experiment_name.c_str(), config.empty() ? nullptr : config.c_str(),
                          seed, dir.c_str(), &summary));
      StringHandle guard{summary, rs_string_free};
      fputs(summary, stdout);
    }
  } catch (const ApiError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return static_cast<int>(e.status);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
