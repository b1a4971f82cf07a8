#include "ewreward/grposim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ewreward/rng.hpp"

namespace ewreward {

namespace {

constexpr double kAdvantageEpsilon = 1e-8;

std::string word_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%02d", index);
  return buf;
}

std::string group_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "g%d", index);
  return buf;
}

}  // namespace

SyntheticTask::SyntheticTask(std::vector<std::string> vocabulary, std::vector<EmotionSet> gold,
                             EwConfig ew, std::uint64_t fingerprint)
    : vocabulary_(std::move(vocabulary)),
      gold_(std::move(gold)),
      ew_(std::move(ew)),
      fingerprint_(fingerprint) {}

SyntheticTask SyntheticTask::generate(const TaskOptions& options) {
  if (options.vocab_size < 4) {
    throw std::invalid_argument("SyntheticTask: vocabulary must hold at least four words");
  }
  if (options.n_contexts < 1) {
    throw std::invalid_argument("SyntheticTask: need at least one context");
  }
  if (options.min_gold_size < 1 || options.min_gold_size > options.max_gold_size ||
      options.max_gold_size > options.vocab_size) {
    throw std::invalid_argument("SyntheticTask: invalid gold size range");
  }

  std::vector<std::string> vocabulary;
  vocabulary.reserve(static_cast<std::size_t>(options.vocab_size));
  for (int i = 0; i < options.vocab_size; ++i) {
    vocabulary.push_back(word_name(i));
  }

  // Odd indices are synonym forms of the preceding even word; four
  // consecutive words share a wheel group, so synonym inflation is free
  // under the raw wheel score.
  LexiconMaps maps;
  for (int i = 1; i < options.vocab_size; i += 2) {
    maps.synonyms[vocabulary[static_cast<std::size_t>(i)]] =
        vocabulary[static_cast<std::size_t>(i - 1)];
  }
  std::map<std::string, std::string> outer_to_inner;
  std::set<std::string> inner_labels;
  for (int i = 0; i < options.vocab_size; i += 2) {
    std::string inner = group_name(i / 4);
    inner_labels.insert(inner);
    outer_to_inner[vocabulary[static_cast<std::size_t>(i)]] = inner;
  }
  EwConfig ew(
      {GroupingPipeline(maps, WheelSpec("synthetic", std::move(outer_to_inner),
                                        std::move(inner_labels)))});

  std::mt19937_64 gen(rng::splitmix64(options.seed ^ 0x7473617465646573ULL));
  std::vector<EmotionSet> gold;
  gold.reserve(static_cast<std::size_t>(options.n_contexts));
  std::vector<int> indices(static_cast<std::size_t>(options.vocab_size));
  std::iota(indices.begin(), indices.end(), 0);
  for (int c = 0; c < options.n_contexts; ++c) {
    int span = options.max_gold_size - options.min_gold_size + 1;
    int size = options.min_gold_size +
               static_cast<int>(rng::uniform_index(gen, static_cast<std::size_t>(span)));
    // Partial Fisher-Yates: the first `size` entries become the gold draw.
    for (int k = 0; k < size; ++k) {
      auto swap_at = k + static_cast<int>(rng::uniform_index(
                             gen, static_cast<std::size_t>(options.vocab_size - k)));
      std::swap(indices[static_cast<std::size_t>(k)], indices[static_cast<std::size_t>(swap_at)]);
    }
    EmotionSet gold_set;
    for (int k = 0; k < size; ++k) {
      gold_set.insert(EmotionWord(vocabulary[static_cast<std::size_t>(indices[static_cast<std::size_t>(k)])]));
    }
    gold.push_back(std::move(gold_set));
  }

  std::uint64_t fp = rng::fnv1a("task");
  fp = rng::splitmix64(fp ^ static_cast<std::uint64_t>(options.vocab_size));
  fp = rng::splitmix64(fp ^ static_cast<std::uint64_t>(options.n_contexts));
  fp = rng::splitmix64(fp ^ options.seed);
  for (const auto& g : gold) {
    for (const auto& w : g) {
      fp = rng::splitmix64(fp ^ rng::fnv1a(w.text()));
    }
  }

  return SyntheticTask(std::move(vocabulary), std::move(gold), std::move(ew), fp);
}

const EmotionSet& SyntheticTask::gold_for(int context) const {
  if (context < 0 || context >= n_contexts()) {
    throw std::out_of_range("SyntheticTask: context index out of range");
  }
  return gold_[static_cast<std::size_t>(context)];
}

double SyntheticTask::gold_mean() const {
  double total = 0.0;
  for (const auto& g : gold_) total += static_cast<double>(g.size());
  return total / static_cast<double>(gold_.size());
}

EmotionSet SyntheticTask::words_for(std::span<const int> word_indices) const {
  EmotionSet out;
  for (int idx : word_indices) {
    out.insert(EmotionWord(vocabulary_[static_cast<std::size_t>(idx)]));
  }
  return out;
}

PolicyState PolicyState::init(const SyntheticTask& task, const SimOptions& options) {
  if (options.max_len < 1) {
    throw std::invalid_argument("PolicyState: max_len must be positive");
  }
  if (!(options.learning_rate > 0.0)) {
    throw std::invalid_argument("PolicyState: learning rate must be positive");
  }
  PolicyState policy;
  policy.max_len = options.max_len;
  policy.learning_rate = options.learning_rate;
  policy.logits.assign(static_cast<std::size_t>(task.n_contexts()),
                       std::vector<double>(static_cast<std::size_t>(task.vocab_size()) + 1, 0.0));
  for (int c = 0; c < task.n_contexts(); ++c) {
    for (const auto& word : task.gold_for(c)) {
      auto it = std::find(task.vocabulary().begin(), task.vocabulary().end(), word.text());
      auto idx = static_cast<std::size_t>(it - task.vocabulary().begin());
      policy.logits[static_cast<std::size_t>(c)][idx] += options.gold_bias;
    }
  }
  policy.reference_logits = policy.logits;
  return policy;
}

std::vector<double> softmax(std::span<const double> logits) {
  double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> probs(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - peak);
    sum += probs[i];
  }
  for (auto& p : probs) p /= sum;
  return probs;
}

Rollout sample_rollout(const PolicyState& policy, int context, std::mt19937_64& gen) {
  const auto& logits = policy.logits.at(static_cast<std::size_t>(context));
  std::vector<double> probs = softmax(logits);
  const int stop = policy.stop_index();

  Rollout rollout;
  for (int t = 0; t < policy.max_len; ++t) {
    int symbol = static_cast<int>(rng::categorical(gen, probs));
    rollout.log_prob += std::log(probs[static_cast<std::size_t>(symbol)]);
    if (symbol == stop) {
      rollout.stopped = true;
      break;
    }
    rollout.word_indices.push_back(symbol);
  }
  return rollout;
}

Rollout sample_rollout(const PolicyState& policy, int context, std::uint64_t seed) {
  std::mt19937_64 gen(rng::splitmix64(seed));
  return sample_rollout(policy, context, gen);
}

double sequence_log_prob(const PolicyState& policy, int context, const Rollout& rollout) {
  const auto& logits = policy.logits.at(static_cast<std::size_t>(context));
  std::vector<double> probs = softmax(logits);
  double total = 0.0;
  for (int symbol : rollout.word_indices) {
    total += std::log(probs[static_cast<std::size_t>(symbol)]);
  }
  if (rollout.stopped) {
    total += std::log(probs[static_cast<std::size_t>(policy.stop_index())]);
  }
  return total;
}

std::vector<double> sequence_log_prob_grad(const PolicyState& policy, int context,
                                           const Rollout& rollout) {
  const auto& logits = policy.logits.at(static_cast<std::size_t>(context));
  std::vector<double> probs = softmax(logits);
  std::vector<double> grad(logits.size(), 0.0);
  double draws = static_cast<double>(rollout.word_indices.size()) + (rollout.stopped ? 1.0 : 0.0);
  for (int symbol : rollout.word_indices) {
    grad[static_cast<std::size_t>(symbol)] += 1.0;
  }
  if (rollout.stopped) {
    grad[static_cast<std::size_t>(policy.stop_index())] += 1.0;
  }
  for (std::size_t k = 0; k < grad.size(); ++k) {
    grad[k] -= draws * probs[k];
  }
  return grad;
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) {
    throw std::invalid_argument("group_advantages: need at least two rewards");
  }
  double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) /
                static_cast<double>(rewards.size());
  double variance = 0.0;
  for (double r : rewards) variance += (r - mean) * (r - mean);
  variance /= static_cast<double>(rewards.size());
  double scale = std::sqrt(variance) + kAdvantageEpsilon;

  std::vector<double> advantages(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    advantages[i] = (rewards[i] - mean) / scale;
  }
  return advantages;
}

PolicyState policy_update(const PolicyState& policy, const GroupSample& group,
                          double kl_coefficient) {
  if (group.rollouts.empty() || group.rollouts.size() != group.advantages.size()) {
    throw std::invalid_argument("policy_update: group rollouts and advantages must align");
  }
  const auto ctx = static_cast<std::size_t>(group.context);
  const auto& logits = policy.logits.at(ctx);
  std::vector<double> probs = softmax(logits);
  const auto stop = static_cast<std::size_t>(policy.stop_index());

  // Sum of advantage-weighted score functions: counts minus draw-weighted
  // probabilities, averaged over the group.
  std::vector<double> grad(logits.size(), 0.0);
  double weighted_draws = 0.0;
  for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
    const Rollout& rollout = group.rollouts[i];
    double advantage = group.advantages[i];
    for (int symbol : rollout.word_indices) {
      grad[static_cast<std::size_t>(symbol)] += advantage;
    }
    if (rollout.stopped) {
      grad[stop] += advantage;
    }
    weighted_draws += advantage * (static_cast<double>(rollout.word_indices.size()) +
                                   (rollout.stopped ? 1.0 : 0.0));
  }
  const double group_size = static_cast<double>(group.rollouts.size());
  for (std::size_t k = 0; k < grad.size(); ++k) {
    grad[k] = (grad[k] - weighted_draws * probs[k]) / group_size;
  }

  if (kl_coefficient != 0.0) {
    std::vector<double> ref_probs = softmax(policy.reference_logits.at(ctx));
    double kl = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      kl += probs[k] * std::log(probs[k] / ref_probs[k]);
    }
    for (std::size_t k = 0; k < grad.size(); ++k) {
      double kl_grad = probs[k] * (std::log(probs[k] / ref_probs[k]) - kl);
      grad[k] -= kl_coefficient * kl_grad;
    }
  }

  PolicyState next = policy;
  auto& next_logits = next.logits[ctx];
  for (std::size_t k = 0; k < grad.size(); ++k) {
    next_logits[k] += policy.learning_rate * grad[k];
    if (!std::isfinite(next_logits[k])) {
      throw std::runtime_error("policy_update: non-finite logit; lower the learning rate");
    }
  }
  return next;
}

namespace {

void check_sim_reward_config(const RewardConfig& cfg) {
  cfg.validate();
  for (RewardKind kind : cfg.enabled) {
    if (kind != RewardKind::Accuracy && kind != RewardKind::Format) {
      throw std::invalid_argument(std::string("run_training: reward '") + to_string(kind) +
                                  "' needs a judge and is not available in the simulator");
    }
  }
}

}  // namespace

TrainingTrace run_training(const SyntheticTask& task, const RewardConfig& reward_cfg,
                           int group_size, int steps, std::uint64_t seed,
                           const SimOptions& options) {
  if (group_size < 2) {
    throw std::invalid_argument("run_training: group size must be at least 2");
  }
  if (steps < 1) {
    throw std::invalid_argument("run_training: need at least one step");
  }
  check_sim_reward_config(reward_cfg);

  PolicyState policy = PolicyState::init(task, options);
  std::mt19937_64 gen(rng::splitmix64(seed ^ 0x6e6961727472ULL));

  TrainingTrace trace;
  trace.task_fingerprint = task.fingerprint();
  trace.seed = seed;
  trace.penalty = reward_cfg.penalty;
  trace.group_size = group_size;
  trace.gold_mean = task.gold_mean();
  trace.steps.reserve(static_cast<std::size_t>(steps));

  for (int step = 0; step < steps; ++step) {
    int context = step % task.n_contexts();
    const EmotionSet& gold = task.gold_for(context);

    GroupSample group;
    group.context = context;
    group.rollouts.reserve(static_cast<std::size_t>(group_size));
    group.rewards.reserve(static_cast<std::size_t>(group_size));

    StepStats stats;
    stats.step = step;
    std::vector<double> totals(static_cast<std::size_t>(group_size), 0.0);
    for (int g = 0; g < group_size; ++g) {
      Rollout rollout = sample_rollout(policy, context, gen);
      EmotionSet pred = task.words_for(rollout.word_indices);

      double raw_ew = ew_sample_score(pred, gold, task.ew()).ew;
      double factor = length_penalty(reward_cfg.penalty, pred.size(), gold.size());

      RewardReport report;
      report.penalty_factor = factor;
      if (reward_cfg.enabled.contains(RewardKind::Accuracy)) {
        report.values[RewardKind::Accuracy] = factor * raw_ew;
      }
      if (reward_cfg.enabled.contains(RewardKind::Format)) {
        report.values[RewardKind::Format] = 1.0;  // synthetic rollouts are well-formed
      }
      for (const auto& [kind, value] : report.values) {
        report.total += reward_cfg.weight(kind) * value;
      }

      totals[static_cast<std::size_t>(g)] = report.total;
      stats.mean_reward += report.total;
      stats.mean_ew += raw_ew;
      stats.mean_len += static_cast<double>(pred.size());
      stats.mean_penalty += factor;

      group.rollouts.push_back(std::move(rollout));
      group.rewards.push_back(std::move(report));
    }
    group.advantages = group_advantages(totals);

    double denom = static_cast<double>(group_size);
    stats.mean_reward /= denom;
    stats.mean_ew /= denom;
    stats.mean_len /= denom;
    stats.mean_penalty /= denom;
    trace.steps.push_back(stats);

    policy = policy_update(policy, group, options.kl_coefficient);
  }
  return trace;
}

double evaluate_policy(const SyntheticTask& task, const PolicyState& policy,
                       int rollouts_per_context, std::uint64_t seed) {
  if (rollouts_per_context < 1) {
    throw std::invalid_argument("evaluate_policy: need at least one rollout per context");
  }
  std::mt19937_64 gen(rng::splitmix64(seed ^ 0x6c617665ULL));
  double total = 0.0;
  for (int c = 0; c < task.n_contexts(); ++c) {
    for (int r = 0; r < rollouts_per_context; ++r) {
      Rollout rollout = sample_rollout(policy, c, gen);
      EmotionSet pred = task.words_for(rollout.word_indices);
      total += ew_sample_score(pred, task.gold_for(c), task.ew()).ew;
    }
  }
  return total / static_cast<double>(task.n_contexts() * rollouts_per_context);
}

namespace {

double trailing_mean(const std::vector<StepStats>& steps, int window,
                     double StepStats::*field) {
  if (steps.empty()) {
    throw std::invalid_argument("trace is empty");
  }
  std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(window, 1)),
                                        steps.size());
  double total = 0.0;
  for (std::size_t i = steps.size() - n; i < steps.size(); ++i) {
    total += steps[i].*field;
  }
  return total / static_cast<double>(n);
}

}  // namespace

double TrainingTrace::final_mean_len(int window) const {
  return trailing_mean(steps, window, &StepStats::mean_len);
}

double TrainingTrace::final_mean_ew(int window) const {
  return trailing_mean(steps, window, &StepStats::mean_ew);
}

double TrainingTrace::final_mean_reward(int window) const {
  return trailing_mean(steps, window, &StepStats::mean_reward);
}

namespace {

HackingRow make_row(const TrainingTrace& trace, double baseline_ew) {
  HackingRow row;
  row.penalty = trace.penalty;
  row.final_ew = trace.final_mean_ew();
  row.final_len = trace.final_mean_len();
  row.overlong = row.final_len > 1.5 * trace.gold_mean;
  row.degradation = row.final_ew < 0.95 * baseline_ew;
  return row;
}

void check_comparable(const TrainingTrace& baseline, const TrainingTrace& other) {
  if (baseline.task_fingerprint != other.task_fingerprint) {
    throw std::invalid_argument("hacking_report: traces come from different tasks");
  }
  if (baseline.seed != other.seed) {
    throw std::invalid_argument("hacking_report: traces come from different seeds");
  }
}

}  // namespace

HackingReport hacking_report(const TrainingTrace& without_penalty,
                             std::span<const TrainingTrace> penalized) {
  if (without_penalty.penalty != PenaltyKind::None) {
    throw std::invalid_argument("hacking_report: baseline trace must be unpenalized");
  }
  HackingReport report;
  report.gold_mean = without_penalty.gold_mean;
  report.task_fingerprint = without_penalty.task_fingerprint;
  double baseline_ew = without_penalty.final_mean_ew();
  report.rows.push_back(make_row(without_penalty, baseline_ew));
  for (const auto& trace : penalized) {
    check_comparable(without_penalty, trace);
    report.rows.push_back(make_row(trace, baseline_ew));
  }
  return report;
}

HackingReport hacking_report(const TrainingTrace& without_penalty,
                             const TrainingTrace& with_penalty) {
  return hacking_report(without_penalty, std::span(&with_penalty, 1));
}

std::string hacking_report_to_json(const HackingReport& report) {
  nlohmann::ordered_json doc;
  doc["gold_mean"] = report.gold_mean;
  doc["task_fingerprint"] = report.task_fingerprint;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json entry;
    entry["penalty"] = to_string(row.penalty);
    entry["final_ew"] = row.final_ew;
    entry["final_len"] = row.final_len;
    entry["overlong"] = row.overlong;
    entry["degradation"] = row.degradation;
    doc["rows"].push_back(entry);
  }
  return doc.dump(2) + "\n";
}

std::string trace_to_jsonl(const TrainingTrace& trace) {
  std::ostringstream out;
  for (const auto& s : trace.steps) {
    nlohmann::ordered_json line;
    line["step"] = s.step;
    line["mean_reward"] = s.mean_reward;
    line["mean_ew"] = s.mean_ew;
    line["mean_len"] = s.mean_len;
    line["mean_penalty"] = s.mean_penalty;
    out << line.dump() << "\n";
  }
  return out.str();
}

std::vector<StepStats> trace_steps_from_jsonl(const std::string& text,
                                              const std::string& origin) {
  std::vector<StepStats> steps;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("step") ||
        !doc.contains("mean_reward") || !doc.contains("mean_ew") || !doc.contains("mean_len") ||
        !doc.contains("mean_penalty")) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": bad trace line");
    }
    StepStats s;
    s.step = doc["step"].get<int>();
    s.mean_reward = doc["mean_reward"].get<double>();
    s.mean_ew = doc["mean_ew"].get<double>();
    s.mean_len = doc["mean_len"].get<double>();
    s.mean_penalty = doc["mean_penalty"].get<double>();
    steps.push_back(s);
  }
  return steps;
}

}  // namespace ewreward
