#include "ewreward/rewards.hpp"

#include <cmath>
#include <stdexcept>

namespace ewreward {

const char* to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::None: return "none";
    case PenaltyKind::P1: return "p1";
    case PenaltyKind::P2: return "p2";
    case PenaltyKind::P3: return "p3";
  }
  return "?";
}

const char* to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::Format: return "format";
    case RewardKind::Accuracy: return "accuracy";
    case RewardKind::Alignment: return "alignment";
    case RewardKind::Dual: return "dual";
    case RewardKind::Perception: return "perception";
  }
  return "?";
}

PenaltyKind penalty_from_string(const std::string& name) {
  if (name == "none") return PenaltyKind::None;
  if (name == "p1") return PenaltyKind::P1;
  if (name == "p2") return PenaltyKind::P2;
  if (name == "p3") return PenaltyKind::P3;
  throw std::invalid_argument("unknown penalty kind '" + name + "'");
}

RewardKind reward_from_string(const std::string& name) {
  if (name == "format") return RewardKind::Format;
  if (name == "accuracy") return RewardKind::Accuracy;
  if (name == "alignment") return RewardKind::Alignment;
  if (name == "dual") return RewardKind::Dual;
  if (name == "perception") return RewardKind::Perception;
  throw std::invalid_argument("unknown reward kind '" + name + "'");
}

double RewardConfig::weight(RewardKind kind) const {
  auto hit = weights.find(kind);
  return hit == weights.end() ? 1.0 : hit->second;
}

void RewardConfig::validate() const {
  if (enabled.empty()) {
    throw std::invalid_argument("reward config: at least one reward must be enabled");
  }
  for (const auto& [kind, w] : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument(std::string("reward config: weight for ") + to_string(kind) +
                                  " must be finite and non-negative");
    }
  }
}

double length_penalty(PenaltyKind kind, std::size_t n_pred, std::size_t n_gold) {
  if (n_gold == 0) {
    throw std::invalid_argument("length_penalty: gold set must be non-empty");
  }
  if (n_pred <= n_gold) return 1.0;
  double n = static_cast<double>(n_pred);
  double m = static_cast<double>(n_gold);
  switch (kind) {
    case PenaltyKind::None:
      return 1.0;
    case PenaltyKind::P1:
      return 1.0 / (n - m + 1.0);
    case PenaltyKind::P2:
      return m / n;
    case PenaltyKind::P3:
      return std::log(std::max(m, 2.0)) / std::log(n);
  }
  return 1.0;
}

double penalized_ew(const EmotionSet& pred, const EmotionSet& gold, PenaltyKind kind,
                    const EwConfig& ew) {
  double factor = length_penalty(kind, pred.size(), gold.size());
  return factor * ew_sample_score(pred, gold, ew).ew;
}

double accuracy_reward(const ParsedOutput& parsed, const EmotionSet& gold,
                       const RewardConfig& cfg, const EwConfig& ew) {
  return penalized_ew(parsed.answer_words, gold, cfg.penalty, ew);
}

double dual_reward(const ParsedOutput& parsed, const EmotionSet& gold,
                   const EmotionExtractor& extractor, const RewardConfig& cfg,
                   const EwConfig& ew) {
  EmotionSet extracted = extractor.extract(parsed.think_text);
  return penalized_ew(extracted, gold, cfg.penalty, ew);
}

double alignment_reward(const ParsedOutput& parsed, const EmotionExtractor& extractor,
                        const EwConfig& ew) {
  EmotionSet extracted = extractor.extract(parsed.think_text);
  return jaccard_similarity(extracted, parsed.answer_words, ew);
}

std::vector<int> perception_reward(const std::vector<ParsedOutput>& group,
                                   const PreferenceJudge& judge, const BtConfig& bt,
                                   const std::string& context) {
  const int n = static_cast<int>(group.size());
  if (n < 2) {
    throw std::invalid_argument("perception_reward: need a group of at least two rollouts");
  }
  std::vector<PreferenceRecord> records;
  records.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Preference pref = judge.compare(context, group[static_cast<std::size_t>(i)].think_text,
                                      group[static_cast<std::size_t>(j)].think_text);
      Outcome outcome = pref == Preference::A   ? Outcome::IWins
                        : pref == Preference::B ? Outcome::JWins
                                                : Outcome::Tie;
      records.push_back({i, j, outcome});
    }
  }
  BtFit fit = fit_bt(records, n, bt);
  std::vector<int> order = rank_items(fit.theta);

  std::vector<int> rewards(static_cast<std::size_t>(n), 0);
  for (int k = 0; k < n / 2; ++k) {
    rewards[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 1;
  }
  return rewards;
}

namespace {

// Everything except perception, which needs the whole group.
RewardReport rollout_rewards(const ParsedOutput& parsed, const EmotionSet& gold,
                             const RewardConfig& cfg, const EwConfig& ew,
                             const JudgeSet& judges) {
  RewardReport report;

  auto need_extractor = [&]() -> const EmotionExtractor& {
    if (judges.extractor == nullptr) {
      throw std::invalid_argument("reward config needs an emotion extractor");
    }
    return *judges.extractor;
  };

  if (cfg.enabled.contains(RewardKind::Format)) {
    report.values[RewardKind::Format] = static_cast<double>(format_reward(parsed));
  }
  if (cfg.enabled.contains(RewardKind::Accuracy)) {
    report.values[RewardKind::Accuracy] = accuracy_reward(parsed, gold, cfg, ew);
    report.penalty_factor = length_penalty(cfg.penalty, parsed.answer_words.size(), gold.size());
  }
  if (cfg.enabled.contains(RewardKind::Dual)) {
    const auto& extractor = need_extractor();
    EmotionSet extracted = extractor.extract(parsed.think_text);
    report.values[RewardKind::Dual] = penalized_ew(extracted, gold, cfg.penalty, ew);
    if (!cfg.enabled.contains(RewardKind::Accuracy)) {
      report.penalty_factor = length_penalty(cfg.penalty, extracted.size(), gold.size());
    }
  }
  if (cfg.enabled.contains(RewardKind::Alignment)) {
    report.values[RewardKind::Alignment] = alignment_reward(parsed, need_extractor(), ew);
  }
  return report;
}

void finalize_total(RewardReport& report, const RewardConfig& cfg) {
  report.total = 0.0;
  for (const auto& [kind, value] : report.values) {
    report.total += cfg.weight(kind) * value;
  }
}

}  // namespace

RewardReport compose_rewards(const ParsedOutput& parsed, const EmotionSet& gold,
                             const RewardConfig& cfg, const EwConfig& ew,
                             const JudgeSet& judges) {
  cfg.validate();
  if (cfg.enabled.contains(RewardKind::Perception)) {
    throw std::invalid_argument(
        "perception reward is group-level; use the group overload of compose_rewards");
  }
  RewardReport report = rollout_rewards(parsed, gold, cfg, ew, judges);
  finalize_total(report, cfg);
  return report;
}

std::vector<RewardReport> compose_rewards(const std::vector<ParsedOutput>& group,
                                          const EmotionSet& gold, const RewardConfig& cfg,
                                          const EwConfig& ew, const JudgeSet& judges,
                                          const std::string& context) {
  cfg.validate();
  std::vector<RewardReport> reports;
  reports.reserve(group.size());
  for (const auto& parsed : group) {
    reports.push_back(rollout_rewards(parsed, gold, cfg, ew, judges));
  }
  if (cfg.enabled.contains(RewardKind::Perception)) {
    if (judges.judge == nullptr) {
      throw std::invalid_argument("perception reward needs a preference judge");
    }
    std::vector<int> bits = perception_reward(group, *judges.judge, BtConfig{}, context);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      reports[i].values[RewardKind::Perception] = static_cast<double>(bits[i]);
    }
  }
  for (auto& report : reports) {
    finalize_total(report, cfg);
  }
  return reports;
}

}  // namespace ewreward
