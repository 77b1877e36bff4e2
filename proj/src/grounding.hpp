#pragma once

#include <map>
#include <string>
#include <vector>

#include "scene.hpp"

namespace relspace::grounding {

using scene::DistanceRel;
using scene::PointCloud;
using scene::PositionRel;

struct RelationLabel {
  PositionRel position;
  DistanceRel distance;
  bool operator==(const RelationLabel& o) const {
    return position == o.position && distance == o.distance;
  }
};

// 2D direction histogram: polar angle from +z in [0, 180] x azimuth in
// (-180, 180], 10 degree bins.
constexpr int kThetaBins = 18;
constexpr int kPhiBins = 36;
// 1D distance histogram: 0.01 m bins over [0, 2) m plus one overflow bin.
constexpr int kDistanceBins = 201;

struct Histogram {
  int rows = 0;        // 1 for 1D
  int cols = 0;
  std::vector<double> values;  // row-major, normalized to sum 1 when non-empty

  double& at(int r, int c) { return values[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return values[static_cast<size_t>(r) * cols + c]; }
  double sum() const;
  void normalize();
  static Histogram position_layout();
  static Histogram distance_layout();
};

// Mean of the smallest ceil(fraction*K) pairwise distances between the clouds,
// K = pair count after stride-subsampling each cloud to at most 500 points.
double closest_distance_stat(const PointCloud& a, const PointCloud& b, double fraction = 0.10);

// The individual distances that the statistic averages; exposed because the
// MSR distance words are histograms over them.
std::vector<double> closest_distances(const PointCloud& a, const PointCloud& b,
                                      double fraction = 0.10);

PositionRel qsr_position(const PointCloud& reference, const PointCloud& target);
DistanceRel qsr_distance(const PointCloud& reference, const PointCloud& target);
DistanceRel distance_from_stat(double stat);
RelationLabel qsr_label(const PointCloud& reference, const PointCloud& target);

Histogram build_position_histogram(const PointCloud& reference, const PointCloud& target);
Histogram build_distance_histogram(const PointCloud& reference, const PointCloud& target,
                                   double fraction = 0.10);

double chi_squared(const Histogram& h, const Histogram& g);
double histogram_intersection(const Histogram& h, const Histogram& g);

struct VisualWord {
  Histogram histogram;
  int update_count = 0;
};

struct GroundingConfidence {
  int feedback_count = 0;
  int qsr_agreements = 0;
  int msr_agreements = 0;

  bool msr_active() const {
    if (feedback_count == 0) return false;
    return msr_agreements > qsr_agreements;  // tie keeps QSR
  }
};

// Learned visual words per relation, plus the controller state.
struct VisualWordStore {
  std::map<PositionRel, VisualWord> position_words;
  std::map<DistanceRel, VisualWord> distance_words;
  GroundingConfidence confidence;

  bool trained() const { return !position_words.empty() && !distance_words.empty(); }
};

// Running-mean merge of a new observation into the word for the relation.
void msr_update_position(VisualWordStore& store, PositionRel rel, const Histogram& observation);
void msr_update_distance(VisualWordStore& store, DistanceRel rel, const Histogram& observation);

PositionRel msr_position(const VisualWordStore& store, const Histogram& query);
DistanceRel msr_distance(const VisualWordStore& store, const Histogram& query);
RelationLabel msr_label(const VisualWordStore& store, const PointCloud& reference,
                        const PointCloud& target);

// Records one human-feedback event and updates the agreement counters.
void controller_step(GroundingConfidence& c, const RelationLabel& qsr, const RelationLabel& msr,
                     const RelationLabel& feedback);

void save_store(const VisualWordStore& store, const std::string& path);
VisualWordStore load_store(const std::string& path);

struct RelationFact {
  std::string relation;  // position or distance name
  std::string a, b;      // ordered: a is <relation> of b
};

// One position and one distance fact per ordered object pair, using the store
// when its controller prefers MSR and QSR otherwise.
std::vector<RelationFact> extract_relations(const std::vector<PointCloud>& clouds,
                                            const VisualWordStore* store);

}  // namespace relspace::grounding
