#ifndef RELSPACE_RELSPACE_H
#define RELSPACE_RELSPACE_H

/* C interface to the relspace scene-reasoning engine. Every function returns
 * an rs_status; on failure rs_last_error() describes what went wrong. Strings
 * the library hands out via char** stay owned by the caller and must be
 * released with rs_string_free. Handles are opaque and freed with their
 * matching *_free call. All calls are thread-safe on independent handles. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rs_status {
  RS_OK = 0,
  RS_EINVAL = 1,   /* bad argument or violated precondition */
  RS_EPARSE = 2,   /* scene or program text did not parse */
  RS_EIO = 3,      /* file could not be read or written */
  RS_EFAIL = 4,    /* ran to completion but found no result (e.g. no plan) */
  RS_EINTERNAL = 5 /* unexpected failure; see rs_last_error */
} rs_status;

/* Message for the last failing call on this thread. Empty string after a
 * success. The pointer stays valid until this thread's next library call. */
const char* rs_last_error(void);

/* Releases any char* the library returned. NULL is fine. */
void rs_string_free(char* s);

typedef struct rs_scene rs_scene;
typedef struct rs_program rs_program;

/* ---------------------------------------------------------------- scenes */

/* arrangement: "towers" (object_count 2..5, one stack), "spread" (exactly 5,
 * all loose), or "intersection" (5 objects, object_count 2..4 stacked).
 * Deterministic for (arrangement, seed, object_count). */
rs_status rs_scene_generate(const char* arrangement, uint64_t seed, int object_count,
                            rs_scene** out);

/* JSON round-trip; the format carries objects, structures, and ground truth. */
rs_status rs_scene_parse(const char* json_text, rs_scene** out);
rs_status rs_scene_json(const rs_scene* s, char** out);
void rs_scene_free(rs_scene* s);

/* Grounds spatial relations from sampled point clouds and appends the scene's
 * attribute facts, one .lp fact per line ("obj_relation(above,b,a)." etc).
 * points_per_object >= 50. store_path may name a saved visual-word store to
 * enable the learned-histogram side of the grounding controller; pass NULL
 * for the geometric rules alone. */
rs_status rs_scene_facts(const rs_scene* s, int points_per_object, const char* store_path,
                         char** out);

/* Sort and predicate declarations for the scene plus the hand-written default
 * knowledge base; combine with rs_scene_facts output to feed rs_reason. */
rs_status rs_scene_kb(const rs_scene* s, char** out);

/* ------------------------------------------------------------- programs */

rs_status rs_program_parse(const char* text, rs_program** out);
void rs_program_free(rs_program* p);

/* Every answer set of the program, one per line: literal texts sorted and
 * space-separated, the empty model printed as "{}". Consistency-restoring
 * rules fire only when the regular program has no model. */
rs_status rs_answer_sets(const rs_program* p, char** out);

/* Cautious occlusion/stability labels over the program's object sort.
 * facts_text (may be "") holds extra .lp facts; obj_relation, obj_surface,
 * obj_size, and tower_height facts are routed to the reasoner, anything else
 * joins the rules. Output lines: "<object> positive|negative|unknown". */
rs_status rs_reason(const char* kb_text, const char* facts_text, const char* task, char** out);

/* ------------------------------------------------------------- planning */

/* Minimal-horizon plans that achieve on(goal_object, goal_location) in the
 * single-arm pickup/putdown domain built from the scene; goal_location is an
 * object id or "table". axioms_text (may be NULL) holds stability rules over
 * stable / obj_relation(above,..) / obj_surface / obj_size that are lifted
 * into state constraints the planner must respect. Output: "horizon H
 * plans N" then one plan per line, actions space-separated. RS_EFAIL when no
 * plan exists within max_horizon. */
rs_status rs_plan(const rs_scene* s, const char* goal_object, const char* goal_location,
                  const char* axioms_text, int max_horizon, char** out);

/* ------------------------------------------------------------- learning */

/* Runs the train-on-failure pipeline over the scenes against a knowledge base
 * with the standard occlusion gap, trains the classifier on the regions of
 * interest that reasoning could not settle, and saves it to model_path.
 * Summary: "examples N loss L". RS_EFAIL if reasoning covered every scene. */
rs_status rs_train(const rs_scene* const* scenes, size_t count, uint64_t seed, int epochs,
                   double rate, const char* model_path, char** summary);

/* Ensemble induction over per-object relational examples drawn from the
 * scenes. task: "stability", "occlusion", or "both". th1 is the leaf-purity /
 * validation-agreement threshold (0.70 learns default rules), th2 the support
 * fraction, th3 the ensemble-consistency fraction; pass 0 for the defaults
 * (0.95 / 0.05 / 0.40). Output: one axiom per line, default-kind axioms
 * suffixed with " % default". */
rs_status rs_induce(const rs_scene* const* scenes, size_t count, const char* task, double th1,
                    double th2, double th3, uint64_t seed, char** out);

/* ----------------------------------------------------------- experiments */

/* name: "grounding", "attention", "induction", "planning", or "all".
 * config_text (may be NULL) holds key=value lines overriding experiment
 * defaults. Writes <name>.csv plus any sidecar files into out_dir (created
 * if missing); summary lists the files written, one per line. Reports are
 * byte-identical for identical (name, config, seed). */
rs_status rs_experiment(const char* name, const char* config_text, uint64_t seed,
                        const char* out_dir, char** summary);

#ifdef __cplusplus
}
#endif

#endif /* RELSPACE_RELSPACE_H */
