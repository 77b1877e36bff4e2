#include "relspace/relspace.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "domain.hpp"
#include "experiments.hpp"
#include "learner.hpp"
#include "logic/al.hpp"
#include "logic/parser.hpp"
#include "logic/reason.hpp"
#include "pipeline.hpp"
#include "scene_io.hpp"

namespace {

thread_local std::string g_error;

char* copy_out(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// Runs the body and maps exceptions onto status codes. Bodies return RS_OK
// or a specific failure code of their own.
template <typename Fn>
rs_status guarded(Fn&& fn) {
  try {
    rs_status st = fn();
    if (st == RS_OK) g_error.clear();
    return st;
  } catch (const relspace::logic::ParseError& e) {
    g_error = e.what();
    return RS_EPARSE;
  } catch (const std::invalid_argument& e) {
    g_error = e.what();
    return RS_EINVAL;
  } catch (const std::ios_base::failure& e) {
    g_error = e.what();
    return RS_EIO;
  } catch (const std::exception& e) {
    g_error = e.what();
    return RS_EINTERNAL;
  } catch (...) {
    g_error = "unknown error";
    return RS_EINTERNAL;
  }
}

rs_status fail(rs_status st, const std::string& message) {
  g_error = message;
  return st;
}

// .lp fact lines for the scene's grounded relations and attributes.
std::string facts_text(const relspace::scene::Scene& s, int points,
                       const relspace::grounding::VisualWordStore* store) {
  auto clouds = relspace::scene::scene_clouds(s, points);
  auto facts = relspace::grounding::extract_relations(clouds, store);
  std::string out;
  for (const auto& lit : relspace::harness::relation_literals(facts)) {
    out += lit.text() + ".\n";
  }
  for (const auto& lit : relspace::harness::attribute_literals(s)) {
    out += lit.text() + ".\n";
  }
  return out;
}

// Parses stability axioms against a throwaway signature; the planner
// re-grounds variables over the actual scene objects.
std::vector<relspace::logic::Rule> parse_axioms(const std::string& text) {
  relspace::logic::Program prog = relspace::logic::parse_program(
      "#sort object = {placeholder}.\n"
      "#sort rel = {above, behind, below, far, front, in, left, not_touching, right, "
      "touching}.\n"
      "#sort surf = {flat, irregular}.\n"
      "#sort size = {small, medium, large}.\n"
      "#sort height = 1 .. 5.\n"
      "#pred obj_relation(rel, object, object).\n"
      "#pred obj_surface(object, surf).\n"
      "#pred obj_size(object, size).\n"
      "#pred tower_height(object, height).\n"
      "#pred stable(object).\n"
      "#pred occluded(object).\n" +
      text);
  return prog.rules;
}

}  // namespace

struct rs_scene {
  relspace::scene::Scene scene;
};

struct rs_program {
  relspace::logic::Program program;
};

extern "C" {

const char* rs_last_error(void) { return g_error.c_str(); }

void rs_string_free(char* s) { std::free(s); }

rs_status rs_scene_generate(const char* arrangement, uint64_t seed, int object_count,
                            rs_scene** out) {
  return guarded([&]() -> rs_status {
    if (!arrangement || !out) return fail(RS_EINVAL, "arrangement and out are required");
    relspace::scene::Arrangement a;
    if (!relspace::scene::arrangement_from_string(arrangement, &a)) {
      return fail(RS_EINVAL, std::string("unknown arrangement: ") + arrangement);
    }
    *out = new rs_scene{relspace::scene::generate_scene(a, seed, object_count)};
    return RS_OK;
  });
}

rs_status rs_scene_parse(const char* json_text, rs_scene** out) {
  return guarded([&]() -> rs_status {
    if (!json_text || !out) return fail(RS_EINVAL, "json_text and out are required");
    *out = new rs_scene{relspace::scene::scene_from_json(json_text)};
    return RS_OK;
  });
}

rs_status rs_scene_json(const rs_scene* s, char** out) {
  return guarded([&]() -> rs_status {
    if (!s || !out) return fail(RS_EINVAL, "scene and out are required");
    *out = copy_out(relspace::scene::scene_to_json(s->scene));
    return RS_OK;
  });
}

void rs_scene_free(rs_scene* s) { delete s; }

rs_status rs_scene_facts(const rs_scene* s, int points_per_object, const char* store_path,
                         char** out) {
  return guarded([&]() -> rs_status {
    if (!s || !out) return fail(RS_EINVAL, "scene and out are required");
    relspace::grounding::VisualWordStore store;
    const relspace::grounding::VisualWordStore* store_ptr = nullptr;
    if (store_path && *store_path) {
      store = relspace::grounding::load_store(store_path);
      store_ptr = &store;
    }
    *out = copy_out(facts_text(s->scene, points_per_object, store_ptr));
    return RS_OK;
  });
}

rs_status rs_scene_kb(const rs_scene* s, char** out) {
  return guarded([&]() -> rs_status {
    if (!s || !out) return fail(RS_EINVAL, "scene and out are required");
    *out = copy_out(relspace::harness::kb_declarations(s->scene) +
                    relspace::harness::kb_axioms(relspace::harness::KbOptions{}));
    return RS_OK;
  });
}

rs_status rs_program_parse(const char* text, rs_program** out) {
  return guarded([&]() -> rs_status {
    if (!text || !out) return fail(RS_EINVAL, "text and out are required");
    *out = new rs_program{relspace::logic::parse_program(text)};
    return RS_OK;
  });
}

void rs_program_free(rs_program* p) { delete p; }

rs_status rs_answer_sets(const rs_program* p, char** out) {
  return guarded([&]() -> rs_status {
    if (!p || !out) return fail(RS_EINVAL, "program and out are required");
    relspace::logic::GroundProgram gp = relspace::logic::ground(p->program);
    relspace::logic::SolveResult solved = relspace::logic::solve_with_cr(gp);
    if (solved.truncated) return fail(RS_EFAIL, "solver budget exhausted: " + solved.diagnostic);
    std::string text;
    for (const auto& m : solved.models) {
      if (m.literals.empty()) {
        text += "{}\n";
        continue;
      }
      std::vector<std::string> parts;
      parts.reserve(m.literals.size());
      for (int id : m.literals) {
        parts.push_back(gp.literals[static_cast<size_t>(id)].text());
      }
      std::sort(parts.begin(), parts.end());
      std::string line;
      for (const auto& part : parts) {
        if (!line.empty()) line += ' ';
        line += part;
      }
      text += line + "\n";
    }
    *out = copy_out(text);
    return RS_OK;
  });
}

rs_status rs_reason(const char* kb_text, const char* facts_text_in, const char* task,
                    char** out) {
  return guarded([&]() -> rs_status {
    if (!kb_text || !task || !out) return fail(RS_EINVAL, "kb_text, task, and out are required");
    std::string combined = kb_text;
    if (facts_text_in && *facts_text_in) combined += std::string("\n") + facts_text_in;
    relspace::logic::Program full = relspace::logic::parse_program(combined);

    // Facts over the scene predicates go to the reasoner as observations;
    // everything else stays a rule.
    std::vector<relspace::logic::Literal> relations, attributes;
    relspace::logic::Program kb;
    kb.signature = full.signature;
    for (const auto& rule : full.rules) {
      if (rule.head && rule.body.empty() && !rule.cr && !rule.head->strong_neg) {
        const std::string& pred = rule.head->atom.pred;
        if (pred == "obj_relation") {
          relations.push_back(*rule.head);
          continue;
        }
        if (pred == "obj_surface" || pred == "obj_size" || pred == "tower_height") {
          attributes.push_back(*rule.head);
          continue;
        }
      }
      kb.rules.push_back(rule);
    }
    relspace::logic::InferResult res =
        relspace::logic::infer_labels(kb, relations, attributes, task);
    if (res.solver_failed) return fail(RS_EFAIL, "reasoning failed: " + res.diagnostic);
    std::string text;
    for (const auto& [id, label] : res.labels) {
      text += id + " " + relspace::logic::label3_text(label) + "\n";
    }
    *out = copy_out(text);
    return RS_OK;
  });
}

rs_status rs_plan(const rs_scene* s, const char* goal_object, const char* goal_location,
                  const char* axioms_text, int max_horizon, char** out) {
  return guarded([&]() -> rs_status {
    if (!s || !goal_object || !goal_location || !out) {
      return fail(RS_EINVAL, "scene, goal_object, goal_location, and out are required");
    }
    if (!s->scene.find(goal_object)) {
      return fail(RS_EINVAL, std::string("unknown goal object: ") + goal_object);
    }
    if (std::string(goal_location) != "table" && !s->scene.find(goal_location)) {
      return fail(RS_EINVAL, std::string("unknown goal location: ") + goal_location);
    }
    std::vector<relspace::logic::Rule> axioms;
    if (axioms_text && *axioms_text) {
      for (auto& rule : parse_axioms(axioms_text)) {
        if (!relspace::scene::lift_stability_axiom(rule)) {
          return fail(RS_EINVAL, "axiom not liftable into the planning domain: " + rule.text());
        }
        axioms.push_back(std::move(rule));
      }
    }
    relspace::scene::ManipDomain d = relspace::scene::build_manip_domain(s->scene, axioms);
    std::vector<relspace::logic::GoalLiteral> goal{
        {false, std::string("on(") + goal_object + "," + goal_location + ")"}};
    relspace::logic::PlanResult r = relspace::logic::plan(d.sys, d.history, goal, max_horizon);
    if (r.truncated) return fail(RS_EFAIL, "planner budget exhausted: " + r.diagnostic);
    if (r.horizon < 0) return fail(RS_EFAIL, r.diagnostic);
    std::ostringstream text;
    text << "horizon " << r.horizon << " plans " << r.plans.size() << "\n";
    for (const auto& p : r.plans) {
      for (size_t i = 0; i < p.size(); ++i) text << (i ? " " : "") << p[i];
      text << "\n";
    }
    *out = copy_out(text.str());
    return RS_OK;
  });
}

rs_status rs_train(const rs_scene* const* scenes, size_t count, uint64_t seed, int epochs,
                   double rate, const char* model_path, char** summary) {
  return guarded([&]() -> rs_status {
    if (!scenes || !model_path || !summary) {
      return fail(RS_EINVAL, "scenes, model_path, and summary are required");
    }
    if (epochs < 1 || rate <= 0) return fail(RS_EINVAL, "epochs and rate must be positive");
    relspace::harness::KbOptions gap;
    gap.occlusion_positive = false;
    relspace::harness::PipelineConfig cfg;
    cfg.train = true;
    relspace::harness::TrainingBuffers buffers;
    for (size_t i = 0; i < count; ++i) {
      if (!scenes[i]) return fail(RS_EINVAL, "scenes may not contain NULL");
      const relspace::scene::Scene& sc = scenes[i]->scene;
      relspace::logic::Program kb = relspace::harness::scene_kb(sc, gap);
      relspace::harness::run_pipeline(sc, kb, nullptr, nullptr, cfg, &buffers);
    }
    if (buffers.learner.empty()) {
      return fail(RS_EFAIL, "reasoning labeled every target; nothing to train on");
    }
    relspace::learn::TrainConfig tc;
    tc.epochs = epochs;
    tc.rate = rate;
    tc.seed = seed;
    relspace::learn::Model model = relspace::learn::train(buffers.learner, tc);
    relspace::learn::save_model(model, model_path);
    std::ostringstream text;
    text << "examples " << buffers.learner.size() << " loss "
         << relspace::harness::format_double(relspace::learn::masked_bce(model, buffers.learner));
    *summary = copy_out(text.str());
    return RS_OK;
  });
}

rs_status rs_induce(const rs_scene* const* scenes, size_t count, const char* task, double th1,
                    double th2, double th3, uint64_t seed, char** out) {
  return guarded([&]() -> rs_status {
    if (!scenes || !task || !out) return fail(RS_EINVAL, "scenes, task, and out are required");
    std::string task_name = task;
    if (task_name != "stability" && task_name != "occlusion" && task_name != "both") {
      return fail(RS_EINVAL, "task must be stability, occlusion, or both");
    }
    std::vector<std::string> tasks;
    if (task_name == "both") tasks = {"occlusion", "stability"};
    else tasks = {task_name};

    relspace::learn::InduceConfig cfg;
    if (th1 > 0) cfg.th1 = th1;
    if (th2 > 0) cfg.th2 = th2;
    if (th3 > 0) cfg.th3 = th3;

    std::string text;
    for (const auto& t : tasks) {
      std::vector<relspace::learn::RelationalExample> examples;
      for (size_t i = 0; i < count; ++i) {
        if (!scenes[i]) return fail(RS_EINVAL, "scenes may not contain NULL");
        const relspace::scene::Scene& sc = scenes[i]->scene;
        auto facts = relspace::harness::oracle_relation_facts(sc);
        std::vector<std::string> ids;
        for (const auto& o : sc.objects) ids.push_back(o.id);
        for (const auto& o : sc.objects) {
          bool positive = t == "occlusion" ? sc.truth.occluded.at(o.id)
                                           : sc.truth.object_stable.at(o.id);
          examples.push_back(relspace::learn::make_example(
              sc, facts, ids, o.id, t, positive,
              t + "-" + std::to_string(sc.seed) + "-" + o.id));
        }
      }
      cfg.seed = relspace::mix_seed(seed, "capi-induce", tasks.size() == 2 && t == "stability");
      for (const auto& cand : relspace::learn::ensemble_induce(examples, cfg)) {
        text += cand.text();
        if (cand.kind == relspace::learn::AxiomKind::with_default) text += " % default";
        text += "\n";
      }
    }
    *out = copy_out(text);
    return RS_OK;
  });
}

rs_status rs_experiment(const char* name, const char* config_text, uint64_t seed,
                        const char* out_dir, char** summary) {
  return guarded([&]() -> rs_status {
    if (!name || !out_dir || !summary) {
      return fail(RS_EINVAL, "name, out_dir, and summary are required");
    }
    relspace::harness::Config cfg;
    if (config_text && *config_text) cfg = relspace::harness::parse_config(config_text);
    auto reports = relspace::harness::run_experiments(name, cfg, seed);
    std::filesystem::create_directories(out_dir);
    std::string written;
    for (const auto& report : reports) {
      std::filesystem::path csv_path = std::filesystem::path(out_dir) / (report.name + ".csv");
      relspace::harness::write_csv(csv_path.string(), report.csv);
      written += csv_path.string() + "\n";
      for (const auto& [filename, content] : report.sidecars) {
        std::filesystem::path side = std::filesystem::path(out_dir) / filename;
        std::ofstream f(side);
        if (!f) throw std::ios_base::failure("cannot write " + side.string());
        f << content;
        written += side.string() + "\n";
      }
    }
    *summary = copy_out(written);
    return RS_OK;
  });
}

}  // extern "C"
