#pragma once
// Set-level wheel metrics: per-wheel precision/recall/F over canonicalized
// word sets, averaged across wheels, plus the grouped Jaccard similarity.
// Pure functions over immutable inputs.

#include <utility>
#include <vector>

#include "ewreward/lexicon.hpp"
#include "ewreward/words.hpp"

namespace ewreward {

// One grouping pipeline per wheel; scores average over all of them.
class EwConfig {
 public:
  explicit EwConfig(std::vector<GroupingPipeline> pipelines);

  std::size_t wheel_count() const { return pipelines_.size(); }
  const std::vector<GroupingPipeline>& pipelines() const { return pipelines_; }

 private:
  std::vector<GroupingPipeline> pipelines_;
};

struct SampleScore {
  std::vector<double> per_wheel_precision;
  std::vector<double> per_wheel_recall;
  std::vector<double> per_wheel_f;
  double ew = 0.0;  // mean of per_wheel_f
};

// Per-sample score. Empty predictions score 0 on every wheel; an empty gold
// set is an annotation defect and throws std::invalid_argument.
SampleScore ew_sample_score(const EmotionSet& pred, const EmotionSet& gold,
                            const EwConfig& cfg);

// Corpus score: per-wheel precision/recall are means of the per-sample
// fractions, the F score is the harmonic mean of those averages (not the
// mean of per-sample F values).
SampleScore ew_corpus_score(const std::vector<std::pair<EmotionSet, EmotionSet>>& samples,
                            const EwConfig& cfg);

// Grouped-set Jaccard similarity averaged over wheels. Two empty grouped
// sets count as identical (similarity 1 on that wheel).
double jaccard_similarity(const EmotionSet& a, const EmotionSet& b, const EwConfig& cfg);

double harmonic_f(double precision, double recall);

}  // namespace ewreward
