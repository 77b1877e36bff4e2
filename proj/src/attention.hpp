#pragma once

#include <set>
#include <string>
#include <vector>

#include "grounding.hpp"
#include "logic/program.hpp"
#include "scene.hpp"

namespace relspace::scene {

// Object subset a failed reasoning task should focus on. Stands in for an
// image region: members plus the union of their boxes.
struct RegionOfInterest {
  std::vector<std::string> members;  // sorted ids, 1 to 5 of them
  Aabb box;
  std::string task;  // occlusion or stability
  std::vector<grounding::RelationFact> triggers;
};

// Rules whose head (under either negation) is the task literal.
std::vector<logic::Rule> relevant_axioms(const logic::Program& kb, const std::string& task);

// Relation names and attribute predicates mentioned in the axiom bodies:
// the first argument of obj_relation literals plus obj_surface and obj_size.
std::set<std::string> body_relations(const std::vector<logic::Rule>& axioms);

// Connected components of the graph whose edges are facts over relevant
// relations; each component with an edge becomes one ROI. Components larger
// than five are trimmed to the five members nearest the component centroid.
std::vector<RegionOfInterest> extract_rois(const Scene& s,
                                           const std::vector<grounding::RelationFact>& facts,
                                           const std::set<std::string>& relevant,
                                           const std::string& task);

}  // namespace relspace::scene
