#include "learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "rng.hpp"

namespace relspace::learn {

namespace {

constexpr int kAttrBase = 0;
constexpr int kPairBase = kSlots * kAttrBits;
constexpr int kMaskBase = kPairBase + kSlots * (kSlots - 1) * kPairBits;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Forward {
  std::array<double, kHidden> h;
  std::array<double, kOutputs> p;
};

Forward forward(const Model& m, const std::vector<double>& x) {
  Forward f;
  for (int j = 0; j < m.hidden; ++j) {
    double a = m.b1[j];
    const double* row = &m.w1[(size_t)j * m.input];
    for (int i = 0; i < m.input; ++i) a += row[i] * x[i];
    f.h[j] = std::tanh(a);
  }
  for (int k = 0; k < m.outputs; ++k) {
    double a = m.b2[k];
    const double* row = &m.w2[(size_t)k * m.hidden];
    for (int j = 0; j < m.hidden; ++j) a += row[j] * f.h[j];
    f.p[k] = sigmoid(a);
  }
  return f;
}

double example_nll(const Forward& f, const Example& ex) {
  double nll = 0;
  for (int k = 0; k < kOutputs; ++k) {
    if (ex.mask[k] == 0) continue;
    double p = std::min(1.0 - 1e-12, std::max(1e-12, f.p[k]));
    nll -= ex.y[k] * std::log(p) + (1.0 - ex.y[k]) * std::log(1.0 - p);
  }
  return nll;
}

double masked_count(const std::vector<Example>& examples) {
  double m = 0;
  for (const auto& ex : examples) {
    m += std::accumulate(ex.mask.begin(), ex.mask.end(), 0.0);
  }
  return m;
}

struct Grad {
  std::vector<double> w1, b1, w2, b2;

  explicit Grad(const Model& m)
      : w1(m.w1.size(), 0), b1(m.b1.size(), 0), w2(m.w2.size(), 0), b2(m.b2.size(), 0) {}

  void clear() {
    std::fill(w1.begin(), w1.end(), 0.0);
    std::fill(b1.begin(), b1.end(), 0.0);
    std::fill(w2.begin(), w2.end(), 0.0);
    std::fill(b2.begin(), b2.end(), 0.0);
  }
};

// Accumulates d(nll)/d(params) for one example, unnormalized.
void backward(const Model& m, const Example& ex, Grad& g) {
  Forward f = forward(m, ex.x);
  std::array<double, kOutputs> d2;
  for (int k = 0; k < m.outputs; ++k) {
    d2[k] = ex.mask[k] == 0 ? 0.0 : f.p[k] - ex.y[k];
  }
  std::array<double, kHidden> dh{};
  for (int k = 0; k < m.outputs; ++k) {
    if (d2[k] == 0) continue;
    g.b2[k] += d2[k];
    double* row = &g.w2[(size_t)k * m.hidden];
    const double* w = &m.w2[(size_t)k * m.hidden];
    for (int j = 0; j < m.hidden; ++j) {
      row[j] += d2[k] * f.h[j];
      dh[j] += d2[k] * w[j];
    }
  }
  for (int j = 0; j < m.hidden; ++j) {
    double d1 = dh[j] * (1.0 - f.h[j] * f.h[j]);
    if (d1 == 0) continue;
    g.b1[j] += d1;
    double* row = &g.w1[(size_t)j * m.input];
    for (int i = 0; i < m.input; ++i) {
      if (ex.x[i] != 0) row[i] += d1 * ex.x[i];
    }
  }
}

void apply_step(Model& m, const Grad& g, double step) {
  for (size_t i = 0; i < m.w1.size(); ++i) m.w1[i] -= step * g.w1[i];
  for (size_t i = 0; i < m.b1.size(); ++i) m.b1[i] -= step * g.b1[i];
  for (size_t i = 0; i < m.w2.size(); ++i) m.w2[i] -= step * g.w2[i];
  for (size_t i = 0; i < m.b2.size(); ++i) m.b2[i] -= step * g.b2[i];
}

}  // namespace

std::vector<double> featurize_roi(const scene::RegionOfInterest& roi,
                                  const std::vector<grounding::RelationFact>& facts,
                                  const scene::Scene& s) {
  if (roi.members.size() > (size_t)kSlots) {
    throw std::invalid_argument("roi has more than 5 members");
  }
  std::vector<std::string> members = roi.members;
  std::sort(members.begin(), members.end());

  std::map<std::pair<std::string, std::string>, std::pair<int, int>> pair_rel;
  for (const auto& f : facts) {
    scene::PositionRel pr;
    scene::DistanceRel dr;
    auto key = std::make_pair(f.a, f.b);
    if (scene::position_from_string(f.relation, &pr)) {
      pair_rel[key].first = (int)pr + 1;
    } else if (scene::distance_from_string(f.relation, &dr)) {
      pair_rel[key].second = (int)dr + 1;
    }
  }

  std::vector<double> x(kFeatureDim, 0.0);
  for (size_t i = 0; i < members.size(); ++i) {
    const scene::ObjectInstance* o = s.find(members[i]);
    if (!o) throw std::invalid_argument("unknown roi member " + members[i]);
    int base = kAttrBase + (int)i * kAttrBits;
    x[base + (int)o->shape] = 1;
    x[base + scene::kShapeCount + (int)o->size] = 1;
    x[base + scene::kShapeCount + scene::kSizeCount + (int)o->surface] = 1;
    x[kMaskBase + (int)i] = 1;
  }
  int pair_index = 0;
  for (size_t i = 0; i < (size_t)kSlots; ++i) {
    for (size_t j = 0; j < (size_t)kSlots; ++j) {
      if (i == j) continue;
      if (i < members.size() && j < members.size()) {
        auto it = pair_rel.find({members[i], members[j]});
        if (it != pair_rel.end()) {
          int base = kPairBase + pair_index * kPairBits;
          if (it->second.first > 0) x[base + it->second.first - 1] = 1;
          if (it->second.second > 0) {
            x[base + scene::kPositionRelCount + it->second.second - 1] = 1;
          }
        }
      }
      ++pair_index;
    }
  }
  return x;
}

Model init_model(uint64_t seed) {
  Model m;
  m.w1.resize((size_t)m.hidden * m.input);
  m.b1.assign(m.hidden, 0.0);
  m.w2.resize((size_t)m.outputs * m.hidden);
  m.b2.assign(m.outputs, 0.0);
  Rng rng(mix_seed(seed, "mlp-init"));
  double r1 = std::sqrt(6.0 / (m.input + m.hidden));
  for (auto& w : m.w1) w = rng.uniform(-r1, r1);
  double r2 = std::sqrt(6.0 / (m.hidden + m.outputs));
  for (auto& w : m.w2) w = rng.uniform(-r2, r2);
  return m;
}

double masked_bce(const Model& m, const std::vector<Example>& examples) {
  double total = masked_count(examples);
  if (total == 0) return 0.0;
  double nll = 0;
  for (const auto& ex : examples) nll += example_nll(forward(m, ex.x), ex);
  return nll / total;
}

Model train(const std::vector<Example>& examples, const TrainConfig& config,
            std::vector<double>* loss_curve) {
  if (examples.empty()) throw std::invalid_argument("empty training set");
  for (const auto& ex : examples) {
    if (ex.x.size() != (size_t)kFeatureDim) {
      throw std::invalid_argument("feature length mismatch");
    }
  }
  Model m = init_model(config.seed);
  if (loss_curve) loss_curve->clear();
  double total = masked_count(examples);
  if (total == 0) return m;

  Grad g(m);
  if (config.batch <= 0) {
    double loss = masked_bce(m, examples);
    int stale = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      g.clear();
      for (const auto& ex : examples) backward(m, ex, g);
      double inv = 1.0 / total;
      double step = config.rate;
      Model saved = m;
      double next = loss;
      for (int attempt = 0; attempt < 8; ++attempt) {
        apply_step(m, g, step * inv);
        next = masked_bce(m, examples);
        if (next <= loss + 1e-12) break;
        m = saved;
        next = loss;
        step *= 0.5;
      }
      stale = next < loss - 1e-12 ? 0 : stale + 1;
      loss = std::min(loss, next);
      if (loss_curve) loss_curve->push_back(loss);
      if (stale >= 25) break;  // converged, remaining epochs change nothing
    }
  } else {
    Rng rng(mix_seed(config.seed, "mlp-shuffle"));
    std::vector<size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      rng.shuffle(order.data(), order.size());
      for (size_t start = 0; start < order.size(); start += (size_t)config.batch) {
        g.clear();
        double batch_mask = 0;
        size_t end = std::min(order.size(), start + (size_t)config.batch);
        for (size_t i = start; i < end; ++i) {
          backward(m, examples[order[i]], g);
          batch_mask += std::accumulate(examples[order[i]].mask.begin(),
                                        examples[order[i]].mask.end(), 0.0);
        }
        if (batch_mask > 0) apply_step(m, g, config.rate / batch_mask);
      }
      if (loss_curve) loss_curve->push_back(masked_bce(m, examples));
    }
  }
  return m;
}

Prediction predict(const Model& m, const std::vector<double>& x) {
  if (x.size() != (size_t)m.input) throw std::invalid_argument("feature length mismatch");
  Forward f = forward(m, x);
  Prediction out;
  out.prob = f.p;
  for (int k = 0; k < kSlots; ++k) {
    out.label[k] = x[kMaskBase + k] != 0 ? (f.p[k] > 0.5 ? 1 : 0) : -1;
  }
  out.label[kSlots] = f.p[kSlots] > 0.5 ? 1 : 0;
  return out;
}

double gradient_check(const Model& m, const Example& ex) {
  std::vector<Example> one{ex};
  Grad g(m);
  backward(m, ex, g);
  double total = std::accumulate(ex.mask.begin(), ex.mask.end(), 0.0);
  if (total == 0) total = 1;

  Model probe = m;
  std::vector<std::pair<double*, double*>> params;
  for (size_t i = 0; i < m.w1.size(); ++i) params.push_back({&probe.w1[i], &g.w1[i]});
  for (size_t i = 0; i < m.b1.size(); ++i) params.push_back({&probe.b1[i], &g.b1[i]});
  for (size_t i = 0; i < m.w2.size(); ++i) params.push_back({&probe.w2[i], &g.w2[i]});
  for (size_t i = 0; i < m.b2.size(); ++i) params.push_back({&probe.b2[i], &g.b2[i]});

  const double h = 1e-5;
  double worst = 0;
  for (auto& [p, a] : params) {
    double saved = *p;
    *p = saved + h;
    double up = masked_bce(probe, one);
    *p = saved - h;
    double down = masked_bce(probe, one);
    *p = saved;
    double numeric = (up - down) / (2 * h);
    double analytic = *a / total;
    double denom = std::max({std::fabs(numeric), std::fabs(analytic), 1e-8});
    worst = std::max(worst, std::fabs(numeric - analytic) / denom);
  }
  return worst;
}

void save_model(const Model& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "relspace_mlp 1\n" << m.input << " " << m.hidden << " " << m.outputs << "\n";
  char buf[64];
  auto dump = [&](const std::vector<double>& v) {
    for (size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", v[i]);
      out << buf << (i + 1 == v.size() ? "\n" : " ");
    }
  };
  dump(m.w1);
  dump(m.b1);
  dump(m.w2);
  dump(m.b2);
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "relspace_mlp" || version != 1) {
    throw std::runtime_error("bad model file " + path);
  }
  Model m;
  in >> m.input >> m.hidden >> m.outputs;
  if (m.input != kFeatureDim || m.hidden != kHidden || m.outputs != kOutputs) {
    throw std::runtime_error("bad model dimensions in " + path);
  }
  m.w1.resize((size_t)m.hidden * m.input);
  m.b1.resize(m.hidden);
  m.w2.resize((size_t)m.outputs * m.hidden);
  m.b2.resize(m.outputs);
  for (auto& w : m.w1) in >> w;
  for (auto& w : m.b1) in >> w;
  for (auto& w : m.w2) in >> w;
  for (auto& w : m.b2) in >> w;
  if (!in) throw std::runtime_error("truncated model file " + path);
  return m;
}

}  // namespace relspace::learn
