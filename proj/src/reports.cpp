#include "reports.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rng.hpp"

namespace relspace::harness {

Config parse_config(const std::string& text) {
  Config out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = line.find_last_not_of(" \t\r");
    line = line.substr(a, b - a + 1);
    size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    size_t v = value.find_first_not_of(" \t");
    value = v == std::string::npos ? "" : value.substr(v);
    out[key] = value;
  }
  return out;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_get(const Config& c, const std::string& key, const std::string& fallback) {
  auto it = c.find(key);
  return it == c.end() ? fallback : it->second;
}

long config_get_int(const Config& c, const std::string& key, long fallback) {
  auto it = c.find(key);
  if (it == c.end()) return fallback;
  try {
    return std::stol(it->second);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": expected integer, got " + it->second);
  }
}

double config_get_double(const Config& c, const std::string& key, double fallback) {
  auto it = c.find(key);
  if (it == c.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": expected number, got " + it->second);
  }
}

std::string config_hash(const Config& c) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : c) h = fnv1a(k + "=" + v + "\n", h);
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
  return buf;
}

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

std::string csv_text(const Csv& csv) {
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(row[i]);
    }
    out += '\n';
  };
  emit(csv.header);
  for (const auto& row : csv.rows) emit(row);
  return out;
}

void write_csv(const std::string& path, const Csv& csv) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << csv_text(csv);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

TaskMetrics metrics(const std::map<std::string, logic::Label3>& predictions,
                    const std::map<std::string, bool>& truth, bool count_undecided) {
  using logic::Label3;
  long tp = 0, fp = 0, fn = 0, undecided = 0, correct = 0, total = 0;
  for (const auto& [id, actual] : truth) {
    auto it = predictions.find(id);
    if (it == predictions.end()) throw std::invalid_argument("missing prediction for " + id);
    ++total;
    Label3 p = it->second;
    if (p == Label3::unknown) {
      ++undecided;
      if (actual) ++fn;
      continue;
    }
    bool positive = p == Label3::positive;
    if (positive == actual) ++correct;
    if (positive && actual) ++tp;
    if (positive && !actual) ++fp;
    if (!positive && actual) ++fn;
  }
  if (predictions.size() != truth.size()) throw std::invalid_argument("id sets differ");

  TaskMetrics m;
  m.accuracy = total ? (double)correct / total : 0;
  long pdenom = tp + fp + (count_undecided ? undecided : 0);
  m.empty_predictions = tp + fp == 0;
  m.precision = pdenom ? (double)tp / pdenom : 0;
  m.recall = tp + fn ? (double)tp / (tp + fn) : 0;
  return m;
}

}  // namespace relspace::harness
