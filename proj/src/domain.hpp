#pragma once

#include <optional>
#include <string>
#include <vector>

#include "logic/al.hpp"
#include "scene.hpp"

namespace relspace::scene {

// Tabletop manipulation domain over a scene: a single arm, pickup/putdown,
// inertial on/in_hand, defined above/occupied, belief fluent stable driven by
// whatever stability axioms are supplied, and a safety constraint that
// forbids states believed unstable.
struct ManipDomain {
  logic::ALSystem sys;
  logic::History history;  // full observation of the initial state
};

// Lifts an atemporal stability axiom (head stable(A) or -stable(A), body over
// obj_relation(above, ...), obj_surface, obj_size and default-negated
// literals) into a state constraint. Returns nothing when a body predicate
// has no counterpart in the planning domain.
std::optional<logic::StateConstraint> lift_stability_axiom(const logic::Rule& axiom);

ManipDomain build_manip_domain(const Scene& scene,
                               const std::vector<logic::Rule>& stability_axioms);

// Runs a plan against a simple physical model. Placement is centered, so the
// only failure mode is putting an object onto an irregular supporter: the
// object slides off and is displaced, and later actions on it do nothing.
struct SimResult {
  bool goal_achieved = false;
  std::vector<std::string> displaced;  // objects that slid off, sorted
};

SimResult simulate_plan(const Scene& scene, const std::vector<std::string>& plan,
                        const std::string& goal_object, const std::string& goal_location);

}  // namespace relspace::scene
