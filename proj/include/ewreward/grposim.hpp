#pragma once
// Desk-scale group-relative policy-gradient simulator over a synthetic
// open-vocabulary emotion task. The policy is a per-context categorical over
// a small emotion vocabulary plus a stop symbol; training maximizes the
// penalized wheel-metric reward. Deliberately minimal: just enough machinery
// to watch prediction length inflate without a penalty and stay tight with
// one.

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ewreward/metrics.hpp"
#include "ewreward/rewards.hpp"
#include "ewreward/words.hpp"

namespace ewreward {

struct TaskOptions {
  int vocab_size = 16;   // words; grouped four per inner label, two synonym forms each
  int n_contexts = 8;
  int min_gold_size = 1;
  int max_gold_size = 3;
  std::uint64_t seed = 0;
};

// A synthetic scoring task: a vocabulary partitioned into synonym groups by
// a generated wheel, plus per-context gold sets drawn from the vocabulary.
class SyntheticTask {
 public:
  static SyntheticTask generate(const TaskOptions& options);

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const std::vector<EmotionSet>& gold() const { return gold_; }
  const EmotionSet& gold_for(int context) const;
  const EwConfig& ew() const { return ew_; }

  int vocab_size() const { return static_cast<int>(vocabulary_.size()); }
  int n_contexts() const { return static_cast<int>(gold_.size()); }
  double gold_mean() const;

  // Stable digest of the generated task; traces carry it so reports can
  // refuse to compare runs from different tasks.
  std::uint64_t fingerprint() const { return fingerprint_; }

  EmotionSet words_for(std::span<const int> word_indices) const;

 private:
  SyntheticTask(std::vector<std::string> vocabulary, std::vector<EmotionSet> gold,
                EwConfig ew, std::uint64_t fingerprint);

  std::vector<std::string> vocabulary_;
  std::vector<EmotionSet> gold_;
  EwConfig ew_;
  std::uint64_t fingerprint_ = 0;
};

struct SimOptions {
  double gold_bias = 0.5;      // initial logit boost for each context's gold words
  double learning_rate = 0.1;
  int max_len = 12;
  double kl_coefficient = 0.0;
};

// Per-context logits over vocabulary + stop. Index vocab_size() is stop.
struct PolicyState {
  std::vector<std::vector<double>> logits;
  std::vector<std::vector<double>> reference_logits;  // frozen at init
  int max_len = 12;
  double learning_rate = 0.1;

  int stop_index() const { return static_cast<int>(logits.front().size()) - 1; }

  static PolicyState init(const SyntheticTask& task, const SimOptions& options = {});
};

struct Rollout {
  std::vector<int> word_indices;  // sampled order, repeats possible
  bool stopped = false;           // true when the stop symbol ended the rollout
  double log_prob = 0.0;
};

struct GroupSample {
  int context = 0;
  std::vector<Rollout> rollouts;
  std::vector<RewardReport> rewards;
  std::vector<double> advantages;
};

std::vector<double> softmax(std::span<const double> logits);

Rollout sample_rollout(const PolicyState& policy, int context, std::mt19937_64& gen);
Rollout sample_rollout(const PolicyState& policy, int context, std::uint64_t seed);

// Log-probability of a recorded rollout under (possibly different) logits,
// and its gradient with respect to those logits.
double sequence_log_prob(const PolicyState& policy, int context, const Rollout& rollout);
std::vector<double> sequence_log_prob_grad(const PolicyState& policy, int context,
                                           const Rollout& rollout);

// Standardized advantages (r - mean) / (std + 1e-8); requires at least two
// rewards. Equal rewards give exact zeros.
std::vector<double> group_advantages(std::span<const double> rewards);

// One ascent step on the group objective, with optional pull toward the
// reference logits. Throws on non-finite gradients.
PolicyState policy_update(const PolicyState& policy, const GroupSample& group,
                          double kl_coefficient);

struct StepStats {
  int step = 0;
  double mean_reward = 0.0;
  double mean_ew = 0.0;       // unpenalized wheel score
  double mean_len = 0.0;      // unique predicted words
  double mean_penalty = 0.0;  // penalty factor actually applied
};

struct TrainingTrace {
  std::vector<StepStats> steps;
  std::uint64_t task_fingerprint = 0;
  std::uint64_t seed = 0;
  PenaltyKind penalty = PenaltyKind::None;
  int group_size = 0;
  double gold_mean = 0.0;

  // Mean over the trailing window (clamped to the trace length).
  double final_mean_len(int window = 50) const;
  double final_mean_ew(int window = 50) const;
  double final_mean_reward(int window = 50) const;
};

// Contexts are visited round-robin; each step samples a group, standardizes
// rewards within it and updates that context's logits. Fully reproducible
// per seed. Only judge-free rewards (accuracy, format) are supported here.
TrainingTrace run_training(const SyntheticTask& task, const RewardConfig& reward_cfg,
                           int group_size, int steps, std::uint64_t seed,
                           const SimOptions& options = {});

// Mean unpenalized wheel score of a policy, sampled without updates.
double evaluate_policy(const SyntheticTask& task, const PolicyState& policy,
                       int rollouts_per_context, std::uint64_t seed);

struct HackingRow {
  PenaltyKind penalty = PenaltyKind::None;
  double final_ew = 0.0;
  double final_len = 0.0;
  bool overlong = false;     // final length exceeds the gold mean by > 50%
  bool degradation = false;  // final score drops > 5% below the unpenalized run
};

struct HackingReport {
  double gold_mean = 0.0;
  std::uint64_t task_fingerprint = 0;
  std::vector<HackingRow> rows;  // unpenalized row first
};

// Compares a penalized run against its unpenalized baseline; both traces
// must come from the same task and seed.
HackingReport hacking_report(const TrainingTrace& without_penalty,
                             const TrainingTrace& with_penalty);
HackingReport hacking_report(const TrainingTrace& without_penalty,
                             std::span<const TrainingTrace> penalized);

std::string hacking_report_to_json(const HackingReport& report);

// Trace rows as JSONL: {"step", "mean_reward", "mean_ew", "mean_len",
// "mean_penalty"} per line.
std::string trace_to_jsonl(const TrainingTrace& trace);
std::vector<StepStats> trace_steps_from_jsonl(const std::string& text,
                                              const std::string& origin = "<memory>");

}  // namespace ewreward
