#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "attention.hpp"
#include "grounding.hpp"
#include "scene.hpp"

namespace relspace::learn {

// Feature layout: 5 object slots of one-hot attributes (9 shapes + 3 sizes +
// 2 surfaces), then the 20 ordered slot pairs of one-hot relations (7 position
// + 3 distance), then the slot presence mask.
constexpr int kSlots = 5;
constexpr int kAttrBits = scene::kShapeCount + scene::kSizeCount + scene::kSurfaceCount;
constexpr int kPairBits = scene::kPositionRelCount + scene::kDistanceRelCount;
constexpr int kFeatureDim = kSlots * kAttrBits + kSlots * (kSlots - 1) * kPairBits + kSlots;
// Per-slot occlusion plus one structure stability bit.
constexpr int kOutputs = kSlots + 1;
constexpr int kHidden = 32;

struct Example {
  std::vector<double> x;             // kFeatureDim
  std::array<double, kOutputs> y;    // targets in {0,1}
  std::array<double, kOutputs> mask; // 1 where the target is defined
};

struct Model {
  int input = kFeatureDim;
  int hidden = kHidden;
  int outputs = kOutputs;
  std::vector<double> w1, b1;  // hidden x input, hidden
  std::vector<double> w2, b2;  // outputs x hidden, outputs

  size_t parameter_count() const {
    return w1.size() + b1.size() + w2.size() + b2.size();
  }
};

struct TrainConfig {
  double rate = 0.01;
  int epochs = 2000;
  uint64_t seed = 0;
  int batch = 0;  // 0 = full batch
};

struct Prediction {
  std::array<double, kOutputs> prob;
  std::array<int, kOutputs> label;  // 0/1, or -1 where the slot is absent
};

// Slot order is the sorted member list; relation facts are looked up per
// ordered member pair. Throws std::invalid_argument past 5 members.
std::vector<double> featurize_roi(const scene::RegionOfInterest& roi,
                                  const std::vector<grounding::RelationFact>& facts,
                                  const scene::Scene& s);

Model init_model(uint64_t seed);

// Mean masked binary cross-entropy over all defined targets.
double masked_bce(const Model& m, const std::vector<Example>& examples);

// Full-batch gradient descent when config.batch is 0, with step halving to
// keep the loss monotone; plain minibatch SGD otherwise. Throws
// std::invalid_argument on an empty set. loss_curve, when given, receives the
// full-batch loss after every epoch.
Model train(const std::vector<Example>& examples, const TrainConfig& config,
            std::vector<double>* loss_curve = nullptr);

Prediction predict(const Model& m, const std::vector<double>& x);

// Max relative error between analytic and central-finite-difference gradients
// over every parameter, on one example.
double gradient_check(const Model& m, const Example& ex);

void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

}  // namespace relspace::learn
