#include "ewreward/metrics.hpp"

#include <stdexcept>

namespace ewreward {

EwConfig::EwConfig(std::vector<GroupingPipeline> pipelines) : pipelines_(std::move(pipelines)) {
  if (pipelines_.empty()) {
    throw std::invalid_argument("EwConfig: need at least one wheel");
  }
}

double harmonic_f(double precision, double recall) {
  double denom = precision + recall;
  if (denom <= 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

SampleScore ew_sample_score(const EmotionSet& pred, const EmotionSet& gold,
                            const EwConfig& cfg) {
  if (gold.empty()) {
    throw std::invalid_argument("ew_sample_score: empty gold set");
  }
  SampleScore score;
  const std::size_t k = cfg.wheel_count();
  score.per_wheel_precision.resize(k, 0.0);
  score.per_wheel_recall.resize(k, 0.0);
  score.per_wheel_f.resize(k, 0.0);

  double f_sum = 0.0;
  for (std::size_t w = 0; w < k; ++w) {
    if (pred.empty()) continue;  // empty prediction scores 0 on every wheel
    const auto& pipeline = cfg.pipelines()[w];
    EmotionSet gp = pipeline.group_set(pred);
    EmotionSet gg = pipeline.group_set(gold);
    double common = static_cast<double>(intersection_size(gg, gp));
    double precision = common / static_cast<double>(gp.size());
    double recall = common / static_cast<double>(gg.size());
    score.per_wheel_precision[w] = precision;
    score.per_wheel_recall[w] = recall;
    score.per_wheel_f[w] = harmonic_f(precision, recall);
    f_sum += score.per_wheel_f[w];
  }
  score.ew = f_sum / static_cast<double>(k);
  return score;
}

SampleScore ew_corpus_score(const std::vector<std::pair<EmotionSet, EmotionSet>>& samples,
                            const EwConfig& cfg) {
  if (samples.empty()) {
    throw std::invalid_argument("ew_corpus_score: empty sample list");
  }
  const std::size_t k = cfg.wheel_count();
  SampleScore corpus;
  corpus.per_wheel_precision.resize(k, 0.0);
  corpus.per_wheel_recall.resize(k, 0.0);
  corpus.per_wheel_f.resize(k, 0.0);

  for (const auto& [pred, gold] : samples) {
    SampleScore s = ew_sample_score(pred, gold, cfg);
    for (std::size_t w = 0; w < k; ++w) {
      corpus.per_wheel_precision[w] += s.per_wheel_precision[w];
      corpus.per_wheel_recall[w] += s.per_wheel_recall[w];
    }
  }

  const double n = static_cast<double>(samples.size());
  double f_sum = 0.0;
  for (std::size_t w = 0; w < k; ++w) {
    corpus.per_wheel_precision[w] /= n;
    corpus.per_wheel_recall[w] /= n;
    corpus.per_wheel_f[w] = harmonic_f(corpus.per_wheel_precision[w], corpus.per_wheel_recall[w]);
    f_sum += corpus.per_wheel_f[w];
  }
  corpus.ew = f_sum / static_cast<double>(k);
  return corpus;
}

double jaccard_similarity(const EmotionSet& a, const EmotionSet& b, const EwConfig& cfg) {
  double total = 0.0;
  for (const auto& pipeline : cfg.pipelines()) {
    EmotionSet ga = pipeline.group_set(a);
    EmotionSet gb = pipeline.group_set(b);
    std::size_t unions = union_size(ga, gb);
    if (unions == 0) {
      total += 1.0;  // two empty grouped sets are identical
    } else {
      total += static_cast<double>(intersection_size(ga, gb)) / static_cast<double>(unions);
    }
  }
  return total / static_cast<double>(cfg.wheel_count());
}

}  // namespace ewreward
