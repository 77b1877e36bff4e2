#pragma once

#include <map>
#include <string>
#include <vector>

#include "logic/reason.hpp"

namespace relspace::harness {

// key=value text, one per line; # starts a comment.
using Config = std::map<std::string, std::string>;

Config parse_config(const std::string& text);
Config load_config(const std::string& path);
std::string config_get(const Config& c, const std::string& key, const std::string& fallback);
long config_get_int(const Config& c, const std::string& key, long fallback);
double config_get_double(const Config& c, const std::string& key, double fallback);
// Stable hash over sorted key=value pairs, reported in experiment rows.
std::string config_hash(const Config& c);

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string csv_text(const Csv& csv);
void write_csv(const std::string& path, const Csv& csv);

// Fixed-precision numbers so reruns are byte-identical.
std::string format_double(double v);

struct TaskMetrics {
  double precision = 0;
  double recall = 0;
  double accuracy = 0;
  bool empty_predictions = false;  // nothing predicted positive
};

// Binary-task scoring of three-valued predictions. Undecided targets count
// as incorrect for accuracy; they enter the precision denominator unless
// count_undecided is false.
TaskMetrics metrics(const std::map<std::string, logic::Label3>& predictions,
                    const std::map<std::string, bool>& truth, bool count_undecided = true);

}  // namespace relspace::harness
