#pragma once
// The four CLI entry points as plain functions: corpus scoring, reward
// computation, preference ranking and simulation runs. Each command either
// fully succeeds (exit 0, outputs atomically renamed into place) or fails
// without leaving partial files behind.

#include <iosfwd>
#include <string>
#include <vector>

#include "ewreward/metrics.hpp"
#include "ewreward/rewards.hpp"
#include "ewreward/words.hpp"

namespace ewreward {

// Prediction file line: {"id": str, "output": str} or {"id": str, "answer":
// [str, ...]} with exactly one of output/answer present.
struct PredictionRecord {
  std::string id;
  bool has_output = false;
  std::string output;               // raw model text, parsed for its answer block
  std::vector<std::string> answer;  // pre-split word list
};

// Gold file line: {"id": str, "labels": [str, ...]} with non-empty labels.
struct GoldRecord {
  std::string id;
  std::vector<std::string> labels;
};

std::vector<PredictionRecord> load_predictions(const std::string& path);
std::vector<GoldRecord> load_gold(const std::string& path);

// Reward config file: {"enabled": [names], "weights": {name: w}, "penalty":
// "none"|"p1"|"p2"|"p3", "require_think": bool}; all keys optional.
RewardConfig reward_config_from_json_text(const std::string& text, const std::string& origin);

// Builds one grouping pipeline per wheel file. `wheels_path` may be a single
// wheel file or a directory whose *.json files are loaded in name order;
// `lexicon_path` may be empty for a pass-through lexicon.
EwConfig load_ew_config(const std::string& wheels_path, const std::string& lexicon_path);

struct ScoreOptions {
  std::string pred_path;
  std::string gold_path;
  std::string wheels_path;
  std::string lexicon_path;  // optional
  std::string out_path;
  int workers = 1;
};

struct RewardOptions {
  std::string pred_path;
  std::string gold_path;
  std::string wheels_path;
  std::string lexicon_path;  // optional
  std::string config_path;   // optional; defaults to accuracy+format with P2
  std::string out_path;
  std::string judge_endpoint;  // optional; falls back to EWR_JUDGE_ENDPOINT
};

struct RankOptions {
  std::string judgments_path;
  int n_items = 0;
  double beta = 1.0;
  std::string out_path;
};

struct SimulateOptions {
  std::string config_path;  // optional; {"task": {...}, "reward": {...}}
  std::string penalty = "sweep";
  int group_size = 4;
  int steps = 2000;
  std::uint64_t seed = 7;
  std::string out_dir;
};

int cmd_score(const ScoreOptions& options, std::ostream& err);
int cmd_reward(const RewardOptions& options, std::ostream& err);
int cmd_rank(const RankOptions& options, std::ostream& err);
int cmd_simulate(const SimulateOptions& options, std::ostream& err);

}  // namespace ewreward
