#include "grounding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace relspace::grounding {

double Histogram::sum() const {
  double s = 0;
  for (double v : values) s += v;
  return s;
}

void Histogram::normalize() {
  double s = sum();
  if (s > 0) {
    for (double& v : values) v /= s;
  }
}

Histogram Histogram::position_layout() {
  Histogram h;
  h.rows = kThetaBins;
  h.cols = kPhiBins;
  h.values.assign(static_cast<size_t>(kThetaBins) * kPhiBins, 0.0);
  return h;
}

Histogram Histogram::distance_layout() {
  Histogram h;
  h.rows = 1;
  h.cols = kDistanceBins;
  h.values.assign(kDistanceBins, 0.0);
  return h;
}

namespace {

std::vector<Vec3> stride_subsample(const std::vector<Vec3>& pts, size_t cap = 500) {
  if (pts.size() <= cap) return pts;
  size_t step = (pts.size() + cap - 1) / cap;
  std::vector<Vec3> out;
  out.reserve(cap);
  for (size_t i = 0; i < pts.size(); i += step) out.push_back(pts[i]);
  return out;
}

Vec3 centroid(const std::vector<Vec3>& pts) {
  Vec3 c{0, 0, 0};
  for (const Vec3& p : pts) c = c + p;
  return c * (1.0 / static_cast<double>(pts.size()));
}

}  // namespace

std::vector<double> closest_distances(const PointCloud& a, const PointCloud& b, double fraction) {
  if (a.points.empty() || b.points.empty()) {
    throw std::invalid_argument("closest_distances: empty point cloud");
  }
  if (fraction <= 0 || fraction > 1) {
    throw std::invalid_argument("closest_distances: fraction out of (0,1]");
  }
  std::vector<Vec3> pa = stride_subsample(a.points);
  std::vector<Vec3> pb = stride_subsample(b.points);
  std::vector<double> d;
  d.reserve(pa.size() * pb.size());
  for (const Vec3& p : pa) {
    for (const Vec3& q : pb) {
      d.push_back((p - q).norm());
    }
  }
  size_t keep = static_cast<size_t>(std::ceil(fraction * static_cast<double>(d.size())));
  keep = std::max<size_t>(1, std::min(keep, d.size()));
  std::nth_element(d.begin(), d.begin() + (keep - 1), d.end());
  d.resize(keep);
  std::sort(d.begin(), d.end());
  return d;
}

double closest_distance_stat(const PointCloud& a, const PointCloud& b, double fraction) {
  std::vector<double> d = closest_distances(a, b, fraction);
  double s = 0;
  for (double v : d) s += v;
  return s / static_cast<double>(d.size());
}

DistanceRel distance_from_stat(double stat) {
  if (stat <= 0.01) return DistanceRel::touching;
  if (stat >= 1.0) return DistanceRel::far_away;
  return DistanceRel::not_touching;
}

PositionRel qsr_position(const PointCloud& reference, const PointCloud& target) {
  if (reference.points.empty() || target.points.empty()) {
    throw std::invalid_argument("qsr_position: empty point cloud");
  }
  Aabb box = bounding_box(reference.points);
  size_t inside = 0;
  for (const Vec3& p : target.points) {
    if (box.contains(p)) ++inside;
  }
  if (2 * inside > target.points.size()) return PositionRel::in;

  // Pyramids with apex at the box centre and faces through the box faces.
  Vec3 c = box.center();
  Vec3 h = box.half_extents();
  h.x = std::max(h.x, 1e-9);
  h.y = std::max(h.y, 1e-9);
  h.z = std::max(h.z, 1e-9);
  size_t votes[6] = {0, 0, 0, 0, 0, 0};  // above, below, left, right, front, behind
  for (const Vec3& p : target.points) {
    Vec3 d = p - c;
    double sx = d.x / h.x, sy = d.y / h.y, sz = d.z / h.z;
    double m = std::max({std::fabs(sx), std::fabs(sy), std::fabs(sz)});
    if (sz > 0 && sz >= m) ++votes[0];
    else if (sz < 0 && -sz >= m) ++votes[1];
    else if (sx < 0 && -sx >= m) ++votes[2];
    else if (sx > 0 && sx >= m) ++votes[3];
    else if (sy < 0 && -sy >= m) ++votes[4];
    else ++votes[5];
  }
  // Plurality; ties resolved in the fixed order above>below>left>right>front>behind.
  static const PositionRel order[6] = {PositionRel::above, PositionRel::below, PositionRel::left,
                                       PositionRel::right, PositionRel::front, PositionRel::behind};
  size_t best = 0;
  for (size_t i = 1; i < 6; ++i) {
    if (votes[i] > votes[best]) best = i;
  }
  return order[best];
}

DistanceRel qsr_distance(const PointCloud& reference, const PointCloud& target) {
  return distance_from_stat(closest_distance_stat(reference, target));
}

RelationLabel qsr_label(const PointCloud& reference, const PointCloud& target) {
  return {qsr_position(reference, target), qsr_distance(reference, target)};
}

Histogram build_position_histogram(const PointCloud& reference, const PointCloud& target) {
  if (reference.points.empty() || target.points.empty()) {
    throw std::invalid_argument("build_position_histogram: empty point cloud");
  }
  const double pi = 3.14159265358979323846;
  Histogram h = Histogram::position_layout();
  Vec3 c = centroid(reference.points);
  for (const Vec3& p : target.points) {
    Vec3 d = p - c;
    double r = d.norm();
    double theta = r > 1e-12 ? std::acos(std::clamp(d.z / r, -1.0, 1.0)) : 0.0;
    double phi = std::atan2(d.y, d.x);
    int tb = std::clamp(static_cast<int>(theta / pi * kThetaBins), 0, kThetaBins - 1);
    int pb = std::clamp(static_cast<int>((phi + pi) / (2 * pi) * kPhiBins), 0, kPhiBins - 1);
    h.at(tb, pb) += 1.0;
  }
  h.normalize();
  return h;
}

Histogram build_distance_histogram(const PointCloud& reference, const PointCloud& target,
                                   double fraction) {
  Histogram h = Histogram::distance_layout();
  for (double d : closest_distances(reference, target, fraction)) {
    int bin = d >= 2.0 ? kDistanceBins - 1 : static_cast<int>(d / 0.01);
    bin = std::clamp(bin, 0, kDistanceBins - 1);
    h.values[bin] += 1.0;
  }
  h.normalize();
  return h;
}

double chi_squared(const Histogram& h, const Histogram& g) {
  if (h.rows != g.rows || h.cols != g.cols) {
    throw std::invalid_argument("chi_squared: mismatched histogram layouts");
  }
  double d = 0;
  for (size_t i = 0; i < h.values.size(); ++i) {
    double a = h.values[i], b = g.values[i];
    double denom = a + b;
    if (denom > 0) {
      double diff = a - b;
      d += diff * diff / (2 * denom);
    }
  }
  return d;
}

double histogram_intersection(const Histogram& h, const Histogram& g) {
  if (h.rows != g.rows || h.cols != g.cols) {
    throw std::invalid_argument("histogram_intersection: mismatched histogram layouts");
  }
  double s = 0;
  for (size_t i = 0; i < h.values.size(); ++i) s += std::min(h.values[i], g.values[i]);
  return s;
}

namespace {

void merge_word(VisualWord& word, const Histogram& observation) {
  if (word.update_count == 0) {
    word.histogram = observation;
    word.update_count = 1;
    return;
  }
  double n = word.update_count;
  for (size_t i = 0; i < word.histogram.values.size(); ++i) {
    word.histogram.values[i] = (n * word.histogram.values[i] + observation.values[i]) / (n + 1);
  }
  word.histogram.normalize();
  word.update_count += 1;
}

}  // namespace

void msr_update_position(VisualWordStore& store, PositionRel rel, const Histogram& observation) {
  if (observation.rows != kThetaBins || observation.cols != kPhiBins) {
    throw std::invalid_argument("msr_update_position: wrong histogram layout");
  }
  merge_word(store.position_words[rel], observation);
}

void msr_update_distance(VisualWordStore& store, DistanceRel rel, const Histogram& observation) {
  if (observation.rows != 1 || observation.cols != kDistanceBins) {
    throw std::invalid_argument("msr_update_distance: wrong histogram layout");
  }
  merge_word(store.distance_words[rel], observation);
}

PositionRel msr_position(const VisualWordStore& store, const Histogram& query) {
  if (store.position_words.empty()) {
    throw std::runtime_error("msr_position: no position words learned");
  }
  PositionRel best = store.position_words.begin()->first;
  double best_d = 0;
  bool first = true;
  for (const auto& [rel, word] : store.position_words) {  // map order = enum order
    double d = chi_squared(query, word.histogram);
    if (first || d < best_d) {
      best = rel;
      best_d = d;
      first = false;
    }
  }
  return best;
}

DistanceRel msr_distance(const VisualWordStore& store, const Histogram& query) {
  if (store.distance_words.empty()) {
    throw std::runtime_error("msr_distance: no distance words learned");
  }
  DistanceRel best = store.distance_words.begin()->first;
  double best_s = -1;
  for (const auto& [rel, word] : store.distance_words) {
    double s = histogram_intersection(query, word.histogram);
    if (s > best_s) {  // ties keep the earlier relation in enum order
      best = rel;
      best_s = s;
    }
  }
  return best;
}

RelationLabel msr_label(const VisualWordStore& store, const PointCloud& reference,
                        const PointCloud& target) {
  return {msr_position(store, build_position_histogram(reference, target)),
          msr_distance(store, build_distance_histogram(reference, target))};
}

void controller_step(GroundingConfidence& c, const RelationLabel& qsr, const RelationLabel& msr,
                     const RelationLabel& feedback) {
  c.feedback_count += 1;
  if (qsr == feedback) c.qsr_agreements += 1;
  if (msr == feedback) c.msr_agreements += 1;
}

// ---------------------------------------------------------------------------
// Store persistence: versioned text, full double precision.

void save_store(const VisualWordStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "relspace_msr 1\n";
  out << "confidence " << store.confidence.feedback_count << " " << store.confidence.qsr_agreements
      << " " << store.confidence.msr_agreements << "\n";
  char buf[64];
  auto write_values = [&](const Histogram& h) {
    for (size_t i = 0; i < h.values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", h.values[i]);
      out << buf << (i + 1 == h.values.size() ? "\n" : " ");
    }
  };
  for (const auto& [rel, word] : store.position_words) {
    out << "position " << scene::to_string(rel) << " " << word.update_count << "\n";
    write_values(word.histogram);
  }
  for (const auto& [rel, word] : store.distance_words) {
    out << "distance " << scene::to_string(rel) << " " << word.update_count << "\n";
    write_values(word.histogram);
  }
}

VisualWordStore load_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "relspace_msr" || version != 1) {
    throw std::runtime_error("not a relspace_msr v1 file: " + path);
  }
  VisualWordStore store;
  std::string kind;
  while (in >> kind) {
    if (kind == "confidence") {
      in >> store.confidence.feedback_count >> store.confidence.qsr_agreements >>
          store.confidence.msr_agreements;
      continue;
    }
    std::string rel_name;
    int count = 0;
    in >> rel_name >> count;
    VisualWord word;
    word.update_count = count;
    if (kind == "position") {
      word.histogram = Histogram::position_layout();
    } else if (kind == "distance") {
      word.histogram = Histogram::distance_layout();
    } else {
      throw std::runtime_error("bad msr store record: " + kind);
    }
    for (double& v : word.histogram.values) in >> v;
    if (!in) throw std::runtime_error("truncated msr store: " + path);
    if (kind == "position") {
      PositionRel rel;
      if (!scene::position_from_string(rel_name, &rel)) {
        throw std::runtime_error("bad position relation: " + rel_name);
      }
      store.position_words[rel] = word;
    } else {
      DistanceRel rel;
      if (!scene::distance_from_string(rel_name, &rel)) {
        throw std::runtime_error("bad distance relation: " + rel_name);
      }
      store.distance_words[rel] = word;
    }
  }
  return store;
}

std::vector<RelationFact> extract_relations(const std::vector<PointCloud>& clouds,
                                            const VisualWordStore* store) {
  bool use_msr = store && store->trained() && store->confidence.msr_active();
  std::vector<RelationFact> facts;
  for (const auto& ref : clouds) {
    for (const auto& target : clouds) {
      if (ref.object_id == target.object_id) continue;
      RelationLabel label =
          use_msr ? msr_label(*store, ref, target) : qsr_label(ref, target);
      // Facts are ordered (target, reference): "target is <rel> of reference".
      facts.push_back({scene::to_string(label.position), target.object_id, ref.object_id});
      facts.push_back({scene::to_string(label.distance), target.object_id, ref.object_id});
    }
  }
  return facts;
}

}  // namespace relspace::grounding
