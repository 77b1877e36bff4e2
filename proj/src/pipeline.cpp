#include "pipeline.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "logic/parser.hpp"

namespace relspace::harness {

using logic::Label3;

std::string kb_declarations(const scene::Scene& s) {
  std::string text = "#sort object = {";
  for (size_t i = 0; i < s.objects.size(); ++i) {
    if (i) text += ", ";
    text += s.objects[i].id;
  }
  text += "}.\n";
  text +=
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
      "#pred occluded(object).\n";
  return text;
}

std::string kb_axioms(const KbOptions& opt) {
  std::string text;
  if (opt.stability_default) text += "stable(A) :- not obj_relation(above,A,B).\n";
  if (opt.occlusion_default) text += "-occluded(A) :- not obj_relation(behind,A,B).\n";
  if (opt.occlusion_positive) text += "occluded(A) :- obj_relation(behind,A,B).\n";
  if (opt.irregular_support) {
    text += "-stable(A) :- obj_relation(above,A,B), obj_surface(B,irregular).\n";
  }
  if (!opt.extra.empty()) {
    text += opt.extra;
    if (text.back() != '\n') text += '\n';
  }
  return text;
}

logic::Program scene_kb(const scene::Scene& s, const KbOptions& opt) {
  return logic::parse_program(kb_declarations(s) + kb_axioms(opt));
}

std::vector<logic::Literal> relation_literals(const std::vector<grounding::RelationFact>& facts) {
  std::vector<logic::Literal> out;
  out.reserve(facts.size());
  for (const auto& f : facts) {
    out.push_back(logic::Literal{
        false, logic::Atom{"obj_relation",
                           {logic::Term::constant(f.relation), logic::Term::constant(f.a),
                            logic::Term::constant(f.b)}}});
  }
  return out;
}

std::vector<logic::Literal> attribute_literals(const scene::Scene& s) {
  std::vector<logic::Literal> out;
  for (const auto& o : s.objects) {
    out.push_back(logic::Literal{
        false, logic::Atom{"obj_surface",
                           {logic::Term::constant(o.id),
                            logic::Term::constant(scene::to_string(o.surface))}}});
    out.push_back(logic::Literal{
        false, logic::Atom{"obj_size",
                           {logic::Term::constant(o.id),
                            logic::Term::constant(scene::to_string(o.size))}}});
    int sidx = s.structure_of(o.id);
    long height = sidx >= 0 ? (long)s.structures[sidx].size() : 1;
    out.push_back(logic::Literal{
        false, logic::Atom{"tower_height",
                           {logic::Term::constant(o.id), logic::Term::integer(height)}}});
  }
  return out;
}

std::vector<grounding::RelationFact> oracle_relation_facts(const scene::Scene& s) {
  std::vector<grounding::RelationFact> out;
  for (const auto& [pair, rels] : s.truth.relations) {
    out.push_back({scene::to_string(rels.first), pair.first, pair.second});
    out.push_back({scene::to_string(rels.second), pair.first, pair.second});
  }
  return out;
}

namespace {

bool truth_of(const scene::Scene& s, const std::string& task, const std::string& object_id) {
  if (task == "occlusion") return s.truth.occluded.at(object_id);
  return s.truth.object_stable.at(object_id);
}

// ROIs for one task, kept only when they contain a failed target.
std::vector<size_t> route_task(const scene::Scene& s, const logic::Program& kb,
                               const std::vector<grounding::RelationFact>& facts,
                               const std::string& task, const std::set<std::string>& failed,
                               PipelineResult& out) {
  std::vector<size_t> kept;
  if (failed.empty()) return kept;
  auto axioms = scene::relevant_axioms(kb, task);
  auto relevant = scene::body_relations(axioms);
  auto rois = scene::extract_rois(s, facts, relevant, task);
  for (auto& roi : rois) {
    std::vector<std::string> origin;
    for (const auto& m : roi.members) {
      if (failed.count(m)) origin.push_back(m);
    }
    if (origin.empty()) continue;
    kept.push_back(out.rois.size());
    out.rois.push_back(std::move(roi));
    out.roi_origins.push_back(std::move(origin));
  }
  return kept;
}

}  // namespace

PipelineResult run_pipeline(const scene::Scene& s, const logic::Program& kb,
                            const grounding::VisualWordStore* msr_store,
                            const learn::Model* model, const PipelineConfig& config,
                            TrainingBuffers* buffers,
                            const std::vector<grounding::RelationFact>* precomputed) {
  PipelineResult out;
  std::vector<grounding::RelationFact> facts;
  if (precomputed) {
    facts = *precomputed;
  } else {
    auto clouds = scene::scene_clouds(s, config.points_per_object);
    facts = grounding::extract_relations(clouds, msr_store);
  }
  auto rel_lits = relation_literals(facts);
  auto attr_lits = attribute_literals(s);

  auto occ = logic::infer_labels(kb, rel_lits, attr_lits, "occlusion", config.limits);
  auto sta = logic::infer_labels(kb, rel_lits, attr_lits, "stability", config.limits);
  out.solver_failed = occ.solver_failed || sta.solver_failed;
  out.diagnostic = occ.diagnostic;
  if (!sta.diagnostic.empty()) {
    if (!out.diagnostic.empty()) out.diagnostic += "; ";
    out.diagnostic += sta.diagnostic;
  }

  std::set<std::string> failed_occlusion, failed_stability;
  for (const auto& o : s.objects) {
    Label3 l = occ.labels.at(o.id);
    out.occlusion[o.id] = {l, "reasoning"};
    bool wrong = config.train && l != Label3::unknown &&
                 (l == Label3::positive) != s.truth.occluded.at(o.id);
    if (l == Label3::unknown || wrong) failed_occlusion.insert(o.id);

    l = sta.labels.at(o.id);
    wrong = config.train && l != Label3::unknown &&
            (l == Label3::positive) != s.truth.object_stable.at(o.id);
    if (l == Label3::unknown || wrong) failed_stability.insert(o.id);
  }

  for (size_t i = 0; i < s.structures.size(); ++i) {
    bool any_negative = false, all_positive = true;
    for (const auto& id : s.structures[i]) {
      Label3 l = sta.labels.at(id);
      if (l == Label3::negative) any_negative = true;
      if (l != Label3::positive) all_positive = false;
    }
    TargetDecision d;
    if (any_negative) d.label = Label3::negative;
    else if (all_positive) d.label = Label3::positive;
    out.stability[s.structure_id(i)] = d;
  }

  auto occ_rois = route_task(s, kb, facts, "occlusion", failed_occlusion, out);
  auto sta_rois = route_task(s, kb, facts, "stability", failed_stability, out);

  if (config.train && buffers) {
    for (size_t idx : occ_rois) {
      const auto& roi = out.rois[idx];
      learn::Example ex;
      ex.x = learn::featurize_roi(roi, facts, s);
      ex.y.fill(0);
      ex.mask.fill(0);
      for (const auto& target : out.roi_origins[idx]) {
        size_t slot = std::lower_bound(roi.members.begin(), roi.members.end(), target) -
                      roi.members.begin();
        ex.y[slot] = s.truth.occluded.at(target) ? 1 : 0;
        ex.mask[slot] = 1;
      }
      buffers->learner.push_back(std::move(ex));
    }
    for (size_t idx : sta_rois) {
      const auto& roi = out.rois[idx];
      learn::Example ex;
      ex.x = learn::featurize_roi(roi, facts, s);
      ex.y.fill(0);
      ex.mask.fill(0);
      bool stable = true;
      std::set<int> touched;
      for (const auto& m : roi.members) touched.insert(s.structure_of(m));
      for (int sidx : touched) {
        if (sidx >= 0) stable = stable && s.truth.stable.at(s.structure_id(sidx));
      }
      ex.y[learn::kSlots] = stable ? 1 : 0;
      ex.mask[learn::kSlots] = 1;
      buffers->learner.push_back(std::move(ex));
    }
    size_t roi_index = 0;
    for (const auto& roi : out.rois) {
      std::string roi_id = roi.task + "-" + std::to_string(s.seed) + "-" +
                           std::to_string(roi_index);
      for (const auto& target : out.roi_origins[roi_index]) {
        buffers->induction.push_back(learn::make_example(
            s, facts, roi.members, target, roi.task, truth_of(s, roi.task, target), roi_id));
      }
      ++roi_index;
    }
  }

  if (!config.train && model) {
    for (size_t idx : occ_rois) {
      const auto& roi = out.rois[idx];
      auto pred = learn::predict(*model, learn::featurize_roi(roi, facts, s));
      for (const auto& target : out.roi_origins[idx]) {
        size_t slot = std::lower_bound(roi.members.begin(), roi.members.end(), target) -
                      roi.members.begin();
        if (pred.label[slot] < 0) continue;
        out.occlusion[target] = {pred.label[slot] ? Label3::positive : Label3::negative,
                                 "learner"};
      }
    }
    for (size_t idx : sta_rois) {
      const auto& roi = out.rois[idx];
      auto pred = learn::predict(*model, learn::featurize_roi(roi, facts, s));
      Label3 label = pred.label[learn::kSlots] ? Label3::positive : Label3::negative;
      std::set<int> touched;
      for (const auto& m : roi.members) touched.insert(s.structure_of(m));
      for (int sidx : touched) {
        if (sidx < 0) continue;
        auto& decision = out.stability[s.structure_id((size_t)sidx)];
        if (decision.label == Label3::unknown) decision = {label, "learner"};
      }
    }
  }
  return out;
}

}  // namespace relspace::harness
