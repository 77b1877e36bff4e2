#include "attention.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace relspace::scene {

namespace {

std::string task_pred(const std::string& task) {
  if (task == "occlusion") return "occluded";
  if (task == "stability") return "stable";
  throw std::invalid_argument("unknown task " + task);
}

}  // namespace

std::vector<logic::Rule> relevant_axioms(const logic::Program& kb, const std::string& task) {
  std::string pred = task_pred(task);
  std::vector<logic::Rule> out;
  for (const auto& r : kb.rules) {
    if (r.head && r.head->atom.pred == pred) out.push_back(r);
  }
  return out;
}

std::set<std::string> body_relations(const std::vector<logic::Rule>& axioms) {
  std::set<std::string> out;
  for (const auto& r : axioms) {
    for (const auto& e : r.body) {
      if (e.kind != logic::BodyElem::Kind::literal) continue;
      const logic::Atom& a = e.lit.atom;
      if (a.pred == "obj_relation" && !a.args.empty() &&
          a.args[0].kind == logic::Term::Kind::constant) {
        out.insert(a.args[0].name);
      } else if (a.pred == "obj_surface" || a.pred == "obj_size") {
        out.insert(a.pred);
      }
    }
  }
  return out;
}

std::vector<RegionOfInterest> extract_rois(const Scene& s,
                                           const std::vector<grounding::RelationFact>& facts,
                                           const std::set<std::string>& relevant,
                                           const std::string& task) {
  task_pred(task);  // validate

  std::map<std::string, std::string> parent;
  for (const auto& o : s.objects) parent[o.id] = o.id;
  std::function<std::string(const std::string&)> find = [&](const std::string& x) {
    std::string r = x;
    while (parent[r] != r) r = parent[r];
    parent[x] = r;
    return r;
  };

  std::vector<grounding::RelationFact> edges;
  for (const auto& f : facts) {
    if (!relevant.count(f.relation)) continue;
    if (!parent.count(f.a) || !parent.count(f.b) || f.a == f.b) continue;
    edges.push_back(f);
    parent[find(f.a)] = find(f.b);
  }
  if (edges.empty()) return {};

  std::map<std::string, std::vector<std::string>> components;  // root -> members
  for (const auto& o : s.objects) components[find(o.id)].push_back(o.id);

  std::vector<RegionOfInterest> out;
  for (auto& [root, members] : components) {
    bool has_edge = false;
    for (const auto& e : edges) {
      if (find(e.a) == root) {
        has_edge = true;
        break;
      }
    }
    if (!has_edge) continue;

    if (members.size() > 5) {
      Vec3 centroid{0, 0, 0};
      for (const auto& id : members) centroid = centroid + s.find(id)->pose.position;
      centroid = centroid * (1.0 / members.size());
      std::stable_sort(members.begin(), members.end(),
                       [&](const std::string& a, const std::string& b) {
                         double da = (s.find(a)->pose.position - centroid).norm();
                         double db = (s.find(b)->pose.position - centroid).norm();
                         if (da != db) return da < db;
                         return a < b;
                       });
      members.resize(5);
    }
    std::sort(members.begin(), members.end());

    RegionOfInterest roi;
    roi.members = members;
    roi.task = task;
    bool first = true;
    for (const auto& id : members) {
      const ObjectInstance* o = s.find(id);
      Aabb b = Aabb::from_center(o->pose.position, o->envelope_half_extents());
      roi.box = first ? b : roi.box.merged(b);
      first = false;
    }
    auto in_roi = [&](const std::string& id) {
      return std::binary_search(members.begin(), members.end(), id);
    };
    for (const auto& e : edges) {
      if (in_roi(e.a) && in_roi(e.b)) roi.triggers.push_back(e);
    }
    out.push_back(std::move(roi));
  }
  std::sort(out.begin(), out.end(), [](const RegionOfInterest& a, const RegionOfInterest& b) {
    return a.members < b.members;
  });
  return out;
}

}  // namespace relspace::scene
