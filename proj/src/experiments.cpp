#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "attention.hpp"
#include "domain.hpp"
#include "learner.hpp"
#include "logic/al.hpp"
#include "logic/parser.hpp"
#include "pipeline.hpp"
#include "rng.hpp"

namespace relspace::harness {

namespace {

using grounding::Histogram;
using grounding::RelationLabel;
using grounding::VisualWordStore;
using logic::Label3;

constexpr const char* kCsvHeader[] = {"experiment", "name", "value", "seed", "config"};

Csv make_csv() {
  Csv csv;
  csv.header.assign(std::begin(kCsvHeader), std::end(kCsvHeader));
  return csv;
}

void add_row(ExperimentReport& report, const std::string& name, const std::string& value,
             uint64_t seed, const std::string& hash) {
  report.csv.rows.push_back({report.name, name, value, std::to_string(seed), hash});
}

// Round-robin over arrangements with varying sizes so every corpus sees
// towers, spread, and crossing stacks.
scene::Scene mixed_scene(uint64_t scene_seed, int index) {
  switch (index % 3) {
    case 0:
      return scene::generate_scene(scene::Arrangement::towers, scene_seed, 2 + (index / 3) % 4);
    case 1: return scene::generate_scene(scene::Arrangement::spread, scene_seed, 5);
    default:
      return scene::generate_scene(scene::Arrangement::intersection, scene_seed,
                                   2 + (index / 3) % 3);
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(pos, comma - pos);
    size_t a = item.find_first_not_of(" \t");
    if (a != std::string::npos) {
      size_t b = item.find_last_not_of(" \t");
      out.push_back(std::stod(item.substr(a, b - a + 1)));
    }
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty list: " + text);
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of nothing");
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- grounding

std::vector<PairSample> grounding_pair_pool(uint64_t seed, const Config& cfg) {
  int scenes = (int)config_get_int(cfg, "grounding_pool_scenes", 36);
  int points = (int)config_get_int(cfg, "points_per_object", 200);
  std::vector<PairSample> pool;
  for (int i = 0; i < scenes; ++i) {
    scene::Scene s = mixed_scene(mix_seed(seed, "grounding-pool", (uint64_t)i), i);
    auto clouds = scene::scene_clouds(s, points);
    for (size_t ai = 0; ai < clouds.size(); ++ai) {
      for (size_t bi = 0; bi < clouds.size(); ++bi) {
        if (ai == bi) continue;
        PairSample p;
        p.a = clouds[ai].object_id;
        p.b = clouds[bi].object_id;
        auto rels = s.truth.relations.at({p.a, p.b});
        p.oracle = {rels.first, rels.second};
        p.qsr = grounding::qsr_label(clouds[bi], clouds[ai]);
        p.position = grounding::build_position_histogram(clouds[bi], clouds[ai]);
        p.distance = grounding::build_distance_histogram(clouds[bi], clouds[ai]);
        pool.push_back(std::move(p));
      }
    }
  }
  return pool;
}

GroundingSchemes run_grounding_subset(const std::vector<PairSample>& pool, uint64_t seed,
                                      int subset, const Config& cfg) {
  int want_train = (int)config_get_int(cfg, "grounding_train_pairs", 150);
  int want_eval = (int)config_get_int(cfg, "grounding_eval_pairs", 200);
  int feedback_per_relation = (int)config_get_int(cfg, "grounding_feedback", 7);
  if (pool.size() < 10) throw std::invalid_argument("pair pool too small");

  std::vector<size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, "grounding-subset", (uint64_t)subset));
  rng.shuffle(order.data(), order.size());

  int train_n = std::min<int>(want_train, (int)pool.size() / 2);
  int eval_n = std::min<int>(want_eval, (int)pool.size() - train_n);
  std::vector<size_t> train(order.begin(), order.begin() + train_n);
  std::vector<size_t> eval(order.begin() + train_n, order.begin() + train_n + eval_n);

  // Feedback events: up to the budget per relation, drawn from the train
  // pairs in shuffled order, labeled by the oracle.
  std::map<std::string, int> position_used, distance_used;
  std::vector<size_t> position_feedback, distance_feedback;
  for (size_t idx : train) {
    const PairSample& p = pool[idx];
    if (position_used[scene::to_string(p.oracle.position)]++ < feedback_per_relation) {
      position_feedback.push_back(idx);
    }
    if (distance_used[scene::to_string(p.oracle.distance)]++ < feedback_per_relation) {
      distance_feedback.push_back(idx);
    }
  }

  VisualWordStore feedback_only;
  for (size_t idx : position_feedback) {
    grounding::msr_update_position(feedback_only, pool[idx].oracle.position, pool[idx].position);
  }
  for (size_t idx : distance_feedback) {
    grounding::msr_update_distance(feedback_only, pool[idx].oracle.distance, pool[idx].distance);
  }

  VisualWordStore mixed;
  for (size_t idx : train) {
    grounding::msr_update_position(mixed, pool[idx].qsr.position, pool[idx].position);
    grounding::msr_update_distance(mixed, pool[idx].qsr.distance, pool[idx].distance);
  }
  for (size_t idx : position_feedback) {
    grounding::msr_update_position(mixed, pool[idx].oracle.position, pool[idx].position);
  }
  for (size_t idx : distance_feedback) {
    grounding::msr_update_distance(mixed, pool[idx].oracle.distance, pool[idx].distance);
  }

  // The combined controller trusts MSR only once it out-agrees QSR on the
  // human feedback it has seen.
  grounding::GroundingConfidence confidence;
  std::set<size_t> feedback_pairs(position_feedback.begin(), position_feedback.end());
  feedback_pairs.insert(distance_feedback.begin(), distance_feedback.end());
  for (size_t idx : feedback_pairs) {
    const PairSample& p = pool[idx];
    RelationLabel msr{grounding::msr_position(mixed, p.position),
                      grounding::msr_distance(mixed, p.distance)};
    grounding::controller_step(confidence, p.qsr, msr, p.oracle);
  }

  auto msr_guess = [](const VisualWordStore& store, const PairSample& p) {
    RelationLabel out{scene::PositionRel::in, scene::DistanceRel::touching};
    bool ok = !store.position_words.empty() && !store.distance_words.empty();
    if (ok) {
      out.position = grounding::msr_position(store, p.position);
      out.distance = grounding::msr_distance(store, p.distance);
    }
    return std::pair<bool, RelationLabel>(ok, out);
  };

  int units = 0, fb_hits = 0, mix_hits = 0, combined_hits = 0, qsr_hits = 0;
  for (size_t idx : eval) {
    const PairSample& p = pool[idx];
    units += 2;
    auto [fb_ok, fb] = msr_guess(feedback_only, p);
    if (fb_ok && fb.position == p.oracle.position) ++fb_hits;
    if (fb_ok && fb.distance == p.oracle.distance) ++fb_hits;
    auto [mix_ok, mix] = msr_guess(mixed, p);
    if (mix_ok && mix.position == p.oracle.position) ++mix_hits;
    if (mix_ok && mix.distance == p.oracle.distance) ++mix_hits;
    RelationLabel chosen = confidence.msr_active() && mix_ok ? mix : p.qsr;
    if (chosen.position == p.oracle.position) ++combined_hits;
    if (chosen.distance == p.oracle.distance) ++combined_hits;
    if (p.qsr.position == p.oracle.position) ++qsr_hits;
    if (p.qsr.distance == p.oracle.distance) ++qsr_hits;
  }

  GroundingSchemes out;
  out.msr_feedback = units ? (double)fb_hits / units : 0;
  out.msr_qsr_feedback = units ? (double)mix_hits / units : 0;
  out.combined = units ? (double)combined_hits / units : 0;
  out.qsr = units ? (double)qsr_hits / units : 0;
  return out;
}

ExperimentReport experiment_grounding(const Config& cfg, uint64_t seed) {
  ExperimentReport report;
  report.name = "grounding";
  report.csv = make_csv();
  std::string hash = config_hash(cfg);

  int subsets = (int)config_get_int(cfg, "grounding_subsets", 10);
  auto pool = grounding_pair_pool(seed, cfg);

  const char* scheme_names[] = {"msr_feedback", "msr_qsr_feedback", "combined"};
  std::vector<std::vector<double>> per_scheme(3);
  for (int k = 0; k < subsets; ++k) {
    GroundingSchemes r = run_grounding_subset(pool, seed, k, cfg);
    double values[] = {r.msr_feedback, r.msr_qsr_feedback, r.combined};
    for (int si = 0; si < 3; ++si) {
      per_scheme[si].push_back(values[si]);
      add_row(report, std::string(scheme_names[si]) + ":subset" + std::to_string(k),
              format_double(values[si]), seed, hash);
    }
  }
  for (int si = 0; si < 3; ++si) {
    double mean = std::accumulate(per_scheme[si].begin(), per_scheme[si].end(), 0.0) /
                  per_scheme[si].size();
    double var = 0;
    for (double v : per_scheme[si]) var += (v - mean) * (v - mean);
    var /= per_scheme[si].size();
    add_row(report, std::string(scheme_names[si]) + ":mean", format_double(mean), seed, hash);
    add_row(report, std::string(scheme_names[si]) + ":stddev", format_double(std::sqrt(var)),
            seed, hash);
  }
  return report;
}

// ---------------------------------------------------------------- attention

namespace {

// Whole-scene counterpart of an ROI: every object in slot order.
scene::RegionOfInterest whole_scene_roi(const scene::Scene& s) {
  scene::RegionOfInterest roi;
  for (const auto& o : s.objects) roi.members.push_back(o.id);
  std::sort(roi.members.begin(), roi.members.end());
  roi.task = "scene";
  return roi;
}

bool scene_truth_stable(const scene::Scene& s) {
  for (const auto& [id, stable] : s.truth.stable) {
    if (!stable) return false;
  }
  return true;
}

struct AttentionTestScene {
  scene::Scene scene;
  std::vector<grounding::RelationFact> facts;
  logic::Program kb;
};

// Accuracy units: one per object occlusion label plus one scene stability
// verdict; undecided counts as wrong.
double pipeline_accuracy(const std::vector<AttentionTestScene>& tests, const learn::Model* model,
                         const PipelineConfig& pipe_cfg) {
  long correct = 0, total = 0;
  for (const auto& t : tests) {
    PipelineResult r =
        run_pipeline(t.scene, t.kb, nullptr, model, pipe_cfg, nullptr, &t.facts);
    for (const auto& o : t.scene.objects) {
      ++total;
      const TargetDecision& d = r.occlusion.at(o.id);
      if (d.label == Label3::unknown) continue;
      if ((d.label == Label3::positive) == t.scene.truth.occluded.at(o.id)) ++correct;
    }
    ++total;
    bool any_unknown = false, any_negative = false;
    for (const auto& [sid, d] : r.stability) {
      if (d.label == Label3::unknown) any_unknown = true;
      if (d.label == Label3::negative) any_negative = true;
    }
    if (!any_unknown || any_negative) {
      bool predicted_stable = !any_negative;
      if (predicted_stable == scene_truth_stable(t.scene)) ++correct;
    }
  }
  return total ? (double)correct / total : 0;
}

double whole_scene_accuracy(const std::vector<AttentionTestScene>& tests,
                            const learn::Model& model) {
  long correct = 0, total = 0;
  for (const auto& t : tests) {
    scene::RegionOfInterest roi = whole_scene_roi(t.scene);
    auto pred = learn::predict(model, learn::featurize_roi(roi, t.facts, t.scene));
    for (size_t k = 0; k < roi.members.size(); ++k) {
      ++total;
      if (pred.label[k] < 0) continue;
      if ((pred.label[k] == 1) == t.scene.truth.occluded.at(roi.members[k])) ++correct;
    }
    ++total;
    if ((pred.label[learn::kSlots] == 1) == scene_truth_stable(t.scene)) ++correct;
  }
  return total ? (double)correct / total : 0;
}

}  // namespace

ExperimentReport experiment_attention(const Config& cfg, uint64_t seed) {
  ExperimentReport report;
  report.name = "attention";
  report.csv = make_csv();
  std::string hash = config_hash(cfg);

  auto budgets_d = parse_list(config_get(cfg, "attention_budgets", "100,200,1000"));
  std::vector<int> budgets(budgets_d.begin(), budgets_d.end());
  for (double b : budgets_d) {
    if (b < 1) throw std::invalid_argument("attention budget must be positive");
  }
  int seeds = (int)config_get_int(cfg, "attention_seeds", 10);
  int test_n = (int)config_get_int(cfg, "attention_test_scenes", 100);
  int epochs = (int)config_get_int(cfg, "attention_epochs", 200);
  int batch = (int)config_get_int(cfg, "attention_batch", 32);
  double rate = config_get_double(cfg, "attention_rate", 0.05);
  int points = (int)config_get_int(cfg, "points_per_object", 200);
  int max_budget = *std::max_element(budgets.begin(), budgets.end());

  // The knowledge gap: no positive occlusion rule, so anything behind
  // another object needs the learner.
  KbOptions kb_opt;
  kb_opt.occlusion_positive = false;

  PipelineConfig train_cfg;
  train_cfg.train = true;
  train_cfg.points_per_object = points;
  PipelineConfig test_cfg;
  test_cfg.train = false;
  test_cfg.points_per_object = points;

  std::vector<AttentionTestScene> tests;
  for (int i = 0; i < test_n; ++i) {
    AttentionTestScene t{mixed_scene(mix_seed(seed, "attention-test", (uint64_t)i), i), {}, {}};
    auto clouds = scene::scene_clouds(t.scene, points);
    t.facts = grounding::extract_relations(clouds, nullptr);
    t.kb = scene_kb(t.scene, kb_opt);
    tests.push_back(std::move(t));
  }

  std::map<std::pair<std::string, int>, std::vector<double>> curves;
  for (int s = 0; s < seeds; ++s) {
    TrainingBuffers buffers;
    std::vector<size_t> learner_count_after;  // per scene prefix sizes
    std::vector<learn::Example> whole;
    for (int j = 0; j < max_budget; ++j) {
      scene::Scene sc =
          mixed_scene(mix_seed(seed, "attention-train", (uint64_t)s * 1000003 + j), j);
      auto clouds = scene::scene_clouds(sc, points);
      auto facts = grounding::extract_relations(clouds, nullptr);
      logic::Program kb = scene_kb(sc, kb_opt);
      run_pipeline(sc, kb, nullptr, nullptr, train_cfg, &buffers, &facts);
      learner_count_after.push_back(buffers.learner.size());

      scene::RegionOfInterest roi = whole_scene_roi(sc);
      learn::Example ex;
      ex.x = learn::featurize_roi(roi, facts, sc);
      ex.y.fill(0);
      ex.mask.fill(0);
      for (size_t k = 0; k < roi.members.size(); ++k) {
        ex.y[k] = sc.truth.occluded.at(roi.members[k]) ? 1 : 0;
        ex.mask[k] = 1;
      }
      ex.y[learn::kSlots] = scene_truth_stable(sc) ? 1 : 0;
      ex.mask[learn::kSlots] = 1;
      whole.push_back(std::move(ex));
    }

    for (size_t bi = 0; bi < budgets.size(); ++bi) {
      int budget = budgets[bi];
      if (budget > max_budget) throw std::invalid_argument("budget beyond training stream");
      learn::TrainConfig tc;
      tc.batch = batch;
      tc.epochs = epochs;
      tc.rate = rate;

      std::vector<learn::Example> roi_set(
          buffers.learner.begin(),
          buffers.learner.begin() + (long)learner_count_after[(size_t)budget - 1]);
      double roi_acc;
      if (roi_set.empty()) {
        roi_acc = pipeline_accuracy(tests, nullptr, test_cfg);
      } else {
        tc.seed = mix_seed(seed, "attention-roi-model", (uint64_t)s * 100 + bi);
        learn::Model m = learn::train(roi_set, tc);
        roi_acc = pipeline_accuracy(tests, &m, test_cfg);
      }

      std::vector<learn::Example> whole_set(whole.begin(), whole.begin() + budget);
      tc.seed = mix_seed(seed, "attention-whole-model", (uint64_t)s * 100 + bi);
      learn::Model wm = learn::train(whole_set, tc);
      double whole_acc = whole_scene_accuracy(tests, wm);

      add_row(report,
              "attention:budget" + std::to_string(budget) + ":seed" + std::to_string(s),
              format_double(roi_acc), seed, hash);
      add_row(report,
              "whole_scene:budget" + std::to_string(budget) + ":seed" + std::to_string(s),
              format_double(whole_acc), seed, hash);
      curves[{"attention", budget}].push_back(roi_acc);
      curves[{"whole_scene", budget}].push_back(whole_acc);
    }
  }

  std::string fig = "# budget median_attention median_whole_scene\n";
  for (int budget : budgets) {
    double ma = median(curves[{"attention", budget}]);
    double mw = median(curves[{"whole_scene", budget}]);
    add_row(report, "attention:budget" + std::to_string(budget) + ":median", format_double(ma),
            seed, hash);
    add_row(report, "whole_scene:budget" + std::to_string(budget) + ":median",
            format_double(mw), seed, hash);
    fig += std::to_string(budget) + " " + format_double(ma) + " " + format_double(mw) + "\n";
  }
  report.sidecars.emplace_back("attention_fig.dat", fig);
  return report;
}

// ---------------------------------------------------------------- induction

InductionTruth induction_truth() {
  InductionTruth t;
  t.normal = {
      "stable(A) :- not obj_relation(above,A,B).",
      "-occluded(A) :- not obj_relation(behind,A,B).",
      "-stable(A) :- obj_relation(above,A,B), obj_surface(B,irregular).",
  };
  // The one genuine statistical regularity of the tower generator: a large
  // object stacked on a small one lands with its weight outside the inset
  // footprint roughly 85% of the time, so the rule holds as a default but
  // never as a hard axiom.
  t.defaults = {
      "-stable(A) :- not stable(A), obj_relation(above,A,B), obj_size(A,large), "
      "obj_size(B,small).",
  };
  return t;
}

namespace {

// Rejection-samples a generated two-object tower whose top and base match the
// wanted sizes and surfaces; placement and oracles stay the generator's.
scene::Scene sample_pair_tower(uint64_t seed, scene::SizeClass top_size, bool base_small,
                               bool base_irregular) {
  for (uint64_t attempt = 0; attempt < 65536; ++attempt) {
    scene::Scene s = scene::generate_scene(scene::Arrangement::towers,
                                           mix_seed(seed, "pair-tower", attempt), 2);
    const auto& base = s.objects[0];
    const auto& top = s.objects[1];
    if (top.size != top_size || top.surface != scene::Surface::flat) continue;
    if ((base.surface == scene::Surface::irregular) != base_irregular) continue;
    if ((base.size == scene::SizeClass::small) != base_small) continue;
    return s;
  }
  throw std::runtime_error("pair tower sampling exhausted its attempts");
}

// Two medium flat-shaped objects in one depth column: the back one ends up
// occluded often enough to carry a regularity but not a hard rule.
scene::Scene sample_depth_pair(uint64_t seed) {
  constexpr double kJitter = 0.13;
  for (uint64_t attempt = 0; attempt < 65536; ++attempt) {
    scene::Scene s = scene::generate_scene(scene::Arrangement::towers,
                                           mix_seed(seed, "depth-pair", attempt), 2);
    scene::ObjectInstance& front = s.objects[0];
    scene::ObjectInstance& back = s.objects[1];
    if (front.size != scene::SizeClass::medium || back.size != scene::SizeClass::medium)
      continue;
    if (front.surface != scene::Surface::flat || back.surface != scene::Surface::flat)
      continue;
    Rng rng(mix_seed(seed, "depth-pose", attempt));
    front.pose.position = {rng.uniform(-0.1, 0.1), rng.uniform(0.30, 0.40),
                           front.half_extents.z};
    double span = front.envelope_half_extents().y + back.envelope_half_extents().y;
    back.pose.position = {front.pose.position.x + kJitter * rng.uniform(-1.0, 1.0),
                          front.pose.position.y + span + rng.uniform(0.03, 0.08),
                          back.half_extents.z};
    s.structures = {{front.id}, {back.id}};
    auto rel = scene::relation_between(back, front);
    if (rel.first != scene::PositionRel::behind ||
        rel.second != scene::DistanceRel::not_touching) {
      continue;
    }
    s.truth.occluded = scene::occlusion_oracle(s);
    s.truth.stable = scene::stability_oracle(s);
    s.truth.object_stable = scene::object_stability_oracle(s);
    s.truth.relations.clear();
    for (const auto& a : s.objects) {
      for (const auto& b : s.objects) {
        if (a.id != b.id) s.truth.relations[{a.id, b.id}] = scene::relation_between(a, b);
      }
    }
    return s;
  }
  throw std::runtime_error("depth pair sampling exhausted its attempts");
}

void append_task_examples(std::vector<learn::RelationalExample>& out, const scene::Scene& s,
                          const std::string& task, const std::string& roi_id) {
  auto facts = oracle_relation_facts(s);
  std::vector<std::string> all;
  for (const auto& o : s.objects) all.push_back(o.id);
  for (const auto& o : s.objects) {
    bool label = task == "occlusion" ? s.truth.occluded.at(o.id)
                                     : s.truth.object_stable.at(o.id);
    out.push_back(learn::make_example(s, facts, all, o.id, task, label, roi_id));
  }
}

}  // namespace

std::vector<learn::RelationalExample> induction_corpus(uint64_t seed, int set_index, int scenes) {
  // Stability evidence comes from stacked pairs, occlusion evidence from
  // depth pairs. Sets alternate their stacking bias: even sets lean on
  // large-over-small stacks with flat bases, odd sets on irregular bases, so
  // across a whole experiment both the hard rule and the default regularity
  // get enough coherent support.
  bool los_family = set_index % 2 == 0;
  int depth = (int)std::lround(scenes * (los_family ? 0.26 : 0.30));
  int primary = (int)std::lround(scenes * (los_family ? 0.44 : 0.40));
  int filler = scenes - depth - primary;

  std::vector<learn::RelationalExample> out;
  std::string set_tag = "set" + std::to_string(set_index);
  for (int j = 0; j < primary; ++j) {
    uint64_t s = mix_seed(seed, "induction-primary", (uint64_t)set_index * 100000 + j);
    scene::Scene sc = los_family
                          ? sample_pair_tower(s, scene::SizeClass::large, true, false)
                          : sample_pair_tower(s, scene::SizeClass::medium, false, true);
    append_task_examples(out, sc, "stability", set_tag + "-primary" + std::to_string(j));
  }
  for (int j = 0; j < filler; ++j) {
    uint64_t s = mix_seed(seed, "induction-filler", (uint64_t)set_index * 100000 + j);
    scene::Scene sc = los_family
                          ? sample_pair_tower(s, scene::SizeClass::medium, true, false)
                          : sample_pair_tower(s, scene::SizeClass::medium, false, false);
    append_task_examples(out, sc, "stability", set_tag + "-filler" + std::to_string(j));
  }
  for (int j = 0; j < depth; ++j) {
    uint64_t s = mix_seed(seed, "induction-depth", (uint64_t)set_index * 100000 + j);
    scene::Scene sc = sample_depth_pair(s);
    append_task_examples(out, sc, "occlusion", set_tag + "-depth" + std::to_string(j));
  }
  return out;
}

ExperimentReport experiment_induction(const Config& cfg, uint64_t seed) {
  ExperimentReport report;
  report.name = "induction";
  report.csv = make_csv();
  std::string hash = config_hash(cfg);

  int sets = (int)config_get_int(cfg, "induction_sets", 10);
  int scenes = (int)config_get_int(cfg, "induction_scenes", 50);
  int reps = (int)config_get_int(cfg, "induction_reps", 3);
  auto th1_list = parse_list(config_get(cfg, "induction_th1", "0.95,0.70,1.00"));
  InductionTruth truth = induction_truth();
  std::set<std::string> normal_truth(truth.normal.begin(), truth.normal.end());
  std::set<std::string> default_truth(truth.defaults.begin(), truth.defaults.end());

  struct Tally {
    long tp = 0, fp = 0, fn = 0;
  };
  std::map<std::pair<int, std::string>, Tally> pooled;            // th1 index, kind
  std::map<std::pair<int, std::string>, std::set<std::string>> recovered;

  for (int set_index = 0; set_index < sets; ++set_index) {
    auto corpus = induction_corpus(seed, set_index, scenes);
    std::vector<learn::RelationalExample> by_task[2];
    for (const auto& ex : corpus) by_task[ex.task == "occlusion"].push_back(ex);

    for (int rep = 0; rep < reps; ++rep) {
      for (size_t ti = 0; ti < th1_list.size(); ++ti) {
        learn::InduceConfig icfg;
        icfg.th1 = th1_list[ti];
        icfg.th2 = config_get_double(cfg, "induction_th2", 0.05);
        icfg.th3 = config_get_double(cfg, "induction_th3", 0.40);
        icfg.ensemble_count = (int)config_get_int(cfg, "induction_ensemble", 100);
        icfg.max_depth = (int)config_get_int(cfg, "induction_depth", 6);

        std::set<std::string> got_normal, got_default;
        for (int task = 0; task < 2; ++task) {
          icfg.seed = mix_seed(seed, "induction-ensemble",
                               ((uint64_t)set_index * 100 + rep) * 100 + ti * 2 + task);
          auto cands = learn::ensemble_induce(by_task[task], icfg);
          for (const auto& c : cands) {
            if (c.kind == learn::AxiomKind::with_default) got_default.insert(c.text());
            else got_normal.insert(c.text());
          }
        }

        auto score = [&](const std::set<std::string>& got, const std::set<std::string>& want,
                         const std::string& kind) {
          Tally t;
          for (const auto& text : got) {
            if (want.count(text)) ++t.tp;
            else ++t.fp;
          }
          for (const auto& text : want) {
            if (!got.count(text)) ++t.fn;
          }
          auto& pool = pooled[{(int)ti, kind}];
          pool.tp += t.tp;
          pool.fp += t.fp;
          pool.fn += t.fn;
          recovered[{(int)ti, kind}].insert(got.begin(), got.end());
          std::string prefix = kind + ":th1=" + format_short(th1_list[ti]) + ":set" +
                               std::to_string(set_index) + ":rep" + std::to_string(rep);
          double precision = t.tp + t.fp ? (double)t.tp / (t.tp + t.fp) : 0;
          double recall = t.tp + t.fn ? (double)t.tp / (t.tp + t.fn) : 0;
          add_row(report, prefix + ":precision", format_double(precision), seed, hash);
          add_row(report, prefix + ":recall", format_double(recall), seed, hash);
        };
        score(got_normal, normal_truth, "normal");
        score(got_default, default_truth, "default");
      }
    }
  }

  // Pooled precision counts every recovered-axiom occurrence; pooled recall
  // asks whether each missing axiom was recovered anywhere in the experiment.
  for (size_t ti = 0; ti < th1_list.size(); ++ti) {
    for (const std::string kind : {"normal", "default"}) {
      const Tally& t = pooled[{(int)ti, kind}];
      const auto& want = kind == "normal" ? normal_truth : default_truth;
      const auto& got = recovered[{(int)ti, kind}];
      long hit = 0;
      for (const auto& text : want) hit += got.count(text) ? 1 : 0;
      double precision = t.tp + t.fp ? (double)t.tp / (t.tp + t.fp) : 0;
      double recall = want.empty() ? 0 : (double)hit / (double)want.size();
      std::string prefix = kind + ":th1=" + format_short(th1_list[ti]) + ":pooled";
      add_row(report, prefix + ":precision", format_double(precision), seed, hash);
      add_row(report, prefix + ":recall", format_double(recall), seed, hash);
    }
  }
  return report;
}

// ----------------------------------------------------------------- planning

namespace {

logic::Rule parse_stability_axiom(const std::string& rule_text) {
  logic::Program prog = logic::parse_program(
      "#sort object = {o}.\n"
      "#sort rel = {above, behind, below, far, front, in, left, not_touching, right, "
      "touching}.\n"
      "#sort surf = {flat, irregular}.\n"
      "#sort size = {small, medium, large}.\n"
      "#pred obj_relation(rel, object, object).\n"
      "#pred obj_surface(object, surf).\n"
      "#pred obj_size(object, size).\n"
      "#pred stable(object).\n"
      "#pred occluded(object).\n" +
      rule_text + "\n");
  if (prog.rules.size() != 1) throw std::invalid_argument("expected one axiom: " + rule_text);
  return prog.rules[0];
}

int objects_above(const scene::Scene& s, const std::string& id) {
  int sidx = s.structure_of(id);
  if (sidx < 0) return 0;
  const auto& stack = s.structures[(size_t)sidx];
  auto it = std::find(stack.begin(), stack.end(), id);
  return (int)(stack.end() - it) - 1;
}

// Anything resting above an irregular surface contradicts the guarded arm's
// stability axiom before the first action, so such initial states cannot be
// paired; only stack tops may be irregular.
bool stacks_restful(const scene::Scene& s) {
  for (const auto& stack : s.structures) {
    for (size_t i = 0; i + 1 < stack.size(); ++i) {
      if (s.find(stack[i])->surface == scene::Surface::irregular) return false;
    }
  }
  return true;
}

// A stack with loose pieces around it gives every trial both rearrangement
// room and tempting park spots, which is what the comparison exercises.
scene::Scene planning_scene(uint64_t seed, int k) {
  for (uint64_t attempt = 0; attempt < 4096; ++attempt) {
    uint64_t sub = mix_seed(seed, "planning-state", (uint64_t)k * 4096 + attempt);
    scene::Scene s =
        scene::generate_scene(scene::Arrangement::intersection, sub, 2 + k % 2);
    if (stacks_restful(s)) return s;
  }
  throw std::runtime_error("planning state sampling exhausted its attempts");
}

bool directly_on(const scene::Scene& s, const std::string& upper, const std::string& lower) {
  for (const auto& stack : s.structures) {
    for (size_t i = 0; i + 1 < stack.size(); ++i) {
      if (stack[i] == lower && stack[i + 1] == upper) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<PlanningTrial> planning_trials(uint64_t seed, int initial_states, int goals) {
  std::vector<PlanningTrial> out;
  for (int k = 0; k < initial_states; ++k) {
    scene::Scene s = planning_scene(seed, k);
    // Goals that reverse a stacked pair force the planner to park the goal
    // location somewhere first; they are the interesting trials, so they get
    // drawn ahead of the goals satisfiable by a bare pick-and-place.
    std::vector<std::pair<std::string, std::string>> reversal, plain;
    for (const auto& x : s.objects) {
      for (const auto& y : s.objects) {
        if (x.id == y.id || y.surface != scene::Surface::flat) continue;
        if (directly_on(s, x.id, y.id)) continue;
        // Keep plans short enough for the horizon bound.
        if (objects_above(s, x.id) > 1 || objects_above(s, y.id) > 1) continue;
        (directly_on(s, y.id, x.id) ? reversal : plain).emplace_back(x.id, y.id);
      }
    }
    Rng rng(mix_seed(seed, "planning-goal", (uint64_t)k));
    rng.shuffle(reversal.data(), reversal.size());
    rng.shuffle(plain.data(), plain.size());
    std::vector<std::pair<std::string, std::string>> candidates = std::move(reversal);
    candidates.insert(candidates.end(), plain.begin(), plain.end());
    for (int g = 0; g < goals && g < (int)candidates.size(); ++g) {
      out.push_back({s, candidates[(size_t)g].first, candidates[(size_t)g].second});
    }
  }
  return out;
}

ExperimentReport experiment_planning(const Config& cfg, uint64_t seed) {
  ExperimentReport report;
  report.name = "planning";
  report.csv = make_csv();
  std::string hash = config_hash(cfg);

  int initial_states = (int)config_get_int(cfg, "planning_states", 40);
  int goals = (int)config_get_int(cfg, "planning_goals", 5);
  int horizon = (int)config_get_int(cfg, "planning_horizon", 8);
  int repeats = (int)config_get_int(cfg, "planning_repeats", 5);
  int time_trials = (int)config_get_int(cfg, "planning_time_trials", 10);
  bool control = config_get_int(cfg, "planning_control", 0) != 0;

  std::vector<logic::Rule> learned;
  if (!control) {
    std::string text = config_get(
        cfg, "planning_axiom", "-stable(A) :- obj_relation(above,A,B), obj_surface(B,irregular).");
    learned.push_back(parse_stability_axiom(text));
  }

  auto trials = planning_trials(seed, initial_states, goals);

  struct ArmTally {
    long trials = 0, plans = 0, correct = 0, incorrect = 0, optimal = 0, suboptimal = 0;
  };
  ArmTally with, without;
  long paired = 0;

  for (const auto& trial : trials) {
    std::vector<logic::GoalLiteral> goal{
        {false, "on(" + trial.goal_object + "," + trial.goal_location + ")"}};
    scene::ManipDomain base = scene::build_manip_domain(trial.scene, {});
    logic::PlanResult r0 = logic::plan(base.sys, base.history, goal, horizon);
    scene::ManipDomain guarded = scene::build_manip_domain(trial.scene, learned);
    logic::PlanResult rw = logic::plan(guarded.sys, guarded.history, goal, horizon);
    if (r0.horizon < 0 || rw.horizon < 0) continue;
    ++paired;

    // Optimality oracle: shortest horizon whose plan space contains one that
    // survives simulated execution.
    int min_correct = -1;
    for (int h = r0.horizon; h <= horizon && min_correct < 0; ++h) {
      logic::PlanResult ph = h == r0.horizon
                                 ? r0
                                 : logic::plans_at_horizon(base.sys, base.history, goal, h);
      for (const auto& p : ph.plans) {
        auto sim = scene::simulate_plan(trial.scene, p, trial.goal_object, trial.goal_location);
        if (sim.goal_achieved) {
          min_correct = h;
          break;
        }
      }
    }

    auto classify = [&](const logic::PlanResult& r, ArmTally& tally) {
      ++tally.trials;
      tally.plans += (long)r.plans.size();
      const auto& chosen = r.plans.front();
      auto sim = scene::simulate_plan(trial.scene, chosen, trial.goal_object,
                                      trial.goal_location);
      if (!sim.goal_achieved) {
        ++tally.incorrect;
        return;
      }
      ++tally.correct;
      if (min_correct >= 0 && (int)chosen.size() == min_correct) ++tally.optimal;
      else ++tally.suboptimal;
    };
    classify(r0, without);
    classify(rw, with);
  }

  auto arm_rows = [&](const char* arm, const ArmTally& t) {
    add_row(report, std::string(arm) + ":trials", std::to_string(t.trials), seed, hash);
    add_row(report, std::string(arm) + ":plans_total", std::to_string(t.plans), seed, hash);
    add_row(report, std::string(arm) + ":correct", std::to_string(t.correct), seed, hash);
    add_row(report, std::string(arm) + ":incorrect", std::to_string(t.incorrect), seed, hash);
    add_row(report, std::string(arm) + ":optimal", std::to_string(t.optimal), seed, hash);
    add_row(report, std::string(arm) + ":suboptimal", std::to_string(t.suboptimal), seed, hash);
    double denom = t.trials ? (double)t.trials : 1;
    add_row(report, std::string(arm) + ":optimal_fraction", format_double(t.optimal / denom),
            seed, hash);
    add_row(report, std::string(arm) + ":incorrect_fraction",
            format_double(t.incorrect / denom), seed, hash);
  };
  arm_rows("with", with);
  arm_rows("without", without);
  add_row(report, "paired_trials", std::to_string(paired), seed, hash);
  add_row(report, "ratio:plan_count",
          format_double(without.plans ? (double)with.plans / without.plans : 0), seed, hash);

  // Wall-clock ratio lives outside the CSV so reruns stay byte-identical.
  using Clock = std::chrono::steady_clock;
  std::vector<double> ms_with, ms_without;
  int timed = std::min<int>(time_trials, (int)trials.size());
  for (int r = 0; r < repeats; ++r) {
    double acc_without = 0, acc_with = 0;
    for (int i = 0; i < timed; ++i) {
      const auto& trial = trials[(size_t)i];
      std::vector<logic::GoalLiteral> goal{
          {false, "on(" + trial.goal_object + "," + trial.goal_location + ")"}};
      auto t0 = Clock::now();
      scene::ManipDomain base = scene::build_manip_domain(trial.scene, {});
      logic::plan(base.sys, base.history, goal, horizon);
      auto t1 = Clock::now();
      scene::ManipDomain guarded = scene::build_manip_domain(trial.scene, learned);
      logic::plan(guarded.sys, guarded.history, goal, horizon);
      auto t2 = Clock::now();
      acc_without += std::chrono::duration<double, std::milli>(t1 - t0).count();
      acc_with += std::chrono::duration<double, std::milli>(t2 - t1).count();
    }
    ms_without.push_back(acc_without);
    ms_with.push_back(acc_with);
  }
  std::string times = "# planning wall-clock, ms per repeat over " + std::to_string(timed) +
                      " trials\n";
  for (int r = 0; r < repeats; ++r) {
    times += "repeat=" + std::to_string(r) + " with=" + format_double(ms_with[(size_t)r]) +
             " without=" + format_double(ms_without[(size_t)r]) + "\n";
  }
  double med_with = median(ms_with), med_without = median(ms_without);
  times += "median_with=" + format_double(med_with) + "\n";
  times += "median_without=" + format_double(med_without) + "\n";
  times += "time_ratio=" + format_double(med_without > 0 ? med_with / med_without : 0) + "\n";
  report.sidecars.emplace_back("planning_times.txt", times);
  return report;
}

std::vector<ExperimentReport> run_experiments(const std::string& name, const Config& cfg,
                                              uint64_t seed) {
  std::vector<ExperimentReport> out;
  if (name == "grounding" || name == "all") out.push_back(experiment_grounding(cfg, seed));
  if (name == "attention" || name == "all") out.push_back(experiment_attention(cfg, seed));
  if (name == "induction" || name == "all") out.push_back(experiment_induction(cfg, seed));
  if (name == "planning" || name == "all") out.push_back(experiment_planning(cfg, seed));
  if (out.empty()) throw std::invalid_argument("unknown experiment: " + name);
  return out;
}

}  // namespace relspace::harness
