#pragma once
// The reward functions: format, accuracy, alignment, dual and perception,
// the multiplicative length penalties that curb synonym inflation, and a
// weighted composition of any subset. Word counts for penalties are taken
// on deduplicated parsed words, before any wheel grouping.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ewreward/judges.hpp"
#include "ewreward/metrics.hpp"
#include "ewreward/parsing.hpp"
#include "ewreward/ranking.hpp"
#include "ewreward/words.hpp"

namespace ewreward {

enum class PenaltyKind { None, P1, P2, P3 };

enum class RewardKind { Format, Accuracy, Alignment, Dual, Perception };

const char* to_string(PenaltyKind kind);
const char* to_string(RewardKind kind);
PenaltyKind penalty_from_string(const std::string& name);
RewardKind reward_from_string(const std::string& name);

struct RewardConfig {
  std::set<RewardKind> enabled{RewardKind::Accuracy, RewardKind::Format};
  std::map<RewardKind, double> weights;  // missing entries default to 1.0
  PenaltyKind penalty = PenaltyKind::P2;
  bool require_think = false;

  double weight(RewardKind kind) const;
  void validate() const;  // throws std::invalid_argument
};

struct RewardReport {
  // Raw reward values in [0,1]; penalty already folded into accuracy/dual.
  std::map<RewardKind, double> values;
  // Factor applied on the accuracy path (dual path when accuracy is
  // disabled); 1.0 when no penalized reward is enabled.
  double penalty_factor = 1.0;
  double total = 0.0;  // sum of weight * value over enabled rewards
};

// Multiplicative penalty for predicting more words than annotated.
// 1 when n_pred <= n_gold; the three kinds tighten from P3 to P1. The P3
// numerator is clamped to log(2) so a single-word gold set cannot zero out
// the reward. Throws std::invalid_argument when n_gold is 0.
double length_penalty(PenaltyKind kind, std::size_t n_pred, std::size_t n_gold);

// Wheel score scaled by the length penalty; 0 for an empty prediction.
double penalized_ew(const EmotionSet& pred, const EmotionSet& gold, PenaltyKind kind,
                    const EwConfig& ew);

double accuracy_reward(const ParsedOutput& parsed, const EmotionSet& gold,
                       const RewardConfig& cfg, const EwConfig& ew);

double dual_reward(const ParsedOutput& parsed, const EmotionSet& gold,
                   const EmotionExtractor& extractor, const RewardConfig& cfg,
                   const EwConfig& ew);

double alignment_reward(const ParsedOutput& parsed, const EmotionExtractor& extractor,
                        const EwConfig& ew);

// Group-level: all pairwise judgments over the reasoning spans are fitted to
// strengths, and the floor(N/2) strongest outputs earn 1 (strength ties break
// toward the lower index). Requires N >= 2.
std::vector<int> perception_reward(const std::vector<ParsedOutput>& group,
                                   const PreferenceJudge& judge, const BtConfig& bt = {},
                                   const std::string& context = "");

// Judge implementations used by the composed rewards; only the ones needed
// by the enabled set have to be present.
struct JudgeSet {
  const EmotionExtractor* extractor = nullptr;
  const PreferenceJudge* judge = nullptr;
};

// Single-rollout composition. Perception is group-level and rejected here.
RewardReport compose_rewards(const ParsedOutput& parsed, const EmotionSet& gold,
                             const RewardConfig& cfg, const EwConfig& ew,
                             const JudgeSet& judges = {});

// Group composition; computes per-rollout rewards plus perception over the
// whole group when it is enabled.
std::vector<RewardReport> compose_rewards(const std::vector<ParsedOutput>& group,
                                          const EmotionSet& gold, const RewardConfig& cfg,
                                          const EwConfig& ew, const JudgeSet& judges = {},
                                          const std::string& context = "");

}  // namespace ewreward
