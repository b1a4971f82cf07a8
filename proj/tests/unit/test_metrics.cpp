#include <doctest.h>

#include <cmath>
#include <random>

#include "ewreward/metrics.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace ewreward;

namespace {

EwConfig mini_config() {
  WheelSpec wheel("mini", {{"happy", "joy"}, {"delighted", "joy"}, {"sad", "sadness"}},
                  {"joy", "sadness"});
  return EwConfig({GroupingPipeline(LexiconMaps{}, wheel)});
}

EmotionSet words(std::initializer_list<const char*> items) {
  EmotionSet out;
  for (const char* item : items) out.insert(EmotionWord(item));
  return out;
}

}  // namespace

TEST_CASE("sample score on the mini wheel") {
  EwConfig cfg = mini_config();

  SampleScore synonym_hit = ew_sample_score(words({"delighted"}), words({"happy"}), cfg);
  CHECK(synonym_hit.per_wheel_precision[0] == 1.0);
  CHECK(synonym_hit.per_wheel_recall[0] == 1.0);
  CHECK(synonym_hit.ew == 1.0);

  SampleScore partial = ew_sample_score(words({"happy", "sad"}), words({"happy"}), cfg);
  CHECK(partial.per_wheel_precision[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(partial.per_wheel_recall[0] == 1.0);
  CHECK(partial.ew == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  SampleScore perfect = ew_sample_score(words({"sad", "happy"}), words({"happy", "sad"}), cfg);
  CHECK(perfect.ew == 1.0);
}

TEST_CASE("empty prediction scores zero, empty gold throws") {
  EwConfig cfg = mini_config();
  SampleScore empty = ew_sample_score(EmotionSet{}, words({"happy"}), cfg);
  CHECK(empty.ew == 0.0);
  CHECK(empty.per_wheel_precision[0] == 0.0);
  CHECK_THROWS_AS(ew_sample_score(words({"happy"}), EmotionSet{}, cfg), std::invalid_argument);
}

TEST_CASE("corpus score averages fractions before the harmonic mean") {
  EwConfig cfg = mini_config();

  // Single sample reduces to the per-sample score.
  auto pair = std::make_pair(words({"happy", "sad"}), words({"happy"}));
  SampleScore corpus = ew_corpus_score({pair}, cfg);
  SampleScore sample = ew_sample_score(pair.first, pair.second, cfg);
  CHECK(corpus.ew == doctest::Approx(sample.ew).epsilon(1e-15));

  // One perfect and one fully-missed sample: averaged P = R = 0.5, F = 0.5.
  SampleScore mixed = ew_corpus_score(
      {{words({"happy"}), words({"happy"})}, {words({"sad"}), words({"happy"})}}, cfg);
  CHECK(mixed.per_wheel_precision[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mixed.per_wheel_recall[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mixed.per_wheel_f[0] == doctest::Approx(0.5).epsilon(1e-12));

  SampleScore all_perfect = ew_corpus_score(
      {{words({"happy"}), words({"delighted"})}, {words({"sad"}), words({"sad"})}}, cfg);
  CHECK(all_perfect.ew == 1.0);

  CHECK_THROWS_AS(ew_corpus_score({}, cfg), std::invalid_argument);
}

TEST_CASE("jaccard similarity over grouped sets") {
  EwConfig cfg = mini_config();
  CHECK(jaccard_similarity(words({"happy", "sad"}), words({"happy", "sad"}), cfg) == 1.0);
  CHECK(jaccard_similarity(words({"happy"}), words({"sad"}), cfg) == 0.0);
  CHECK(jaccard_similarity(words({"happy", "sad"}), words({"happy"}), cfg) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // Synonyms land in the same group and count as equal.
  CHECK(jaccard_similarity(words({"delighted"}), words({"happy"}), cfg) == 1.0);
  // Two empty sets are identical by convention.
  CHECK(jaccard_similarity(EmotionSet{}, EmotionSet{}, cfg) == 1.0);
  CHECK(jaccard_similarity(EmotionSet{}, words({"happy"}), cfg) == 0.0);
}

TEST_CASE("sample scores match the brute-force reference") {
  std::mt19937_64 gen(424242);
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = testing::make_instance(gen);
    EwConfig cfg = inst.config();
    auto pred_raw = testing::pick_words(gen, inst.universe, 5, true);
    auto gold_raw = testing::pick_words(gen, inst.universe, 5, false);

    SampleScore lib =
        ew_sample_score(EmotionSet::from_raw_tokens(pred_raw),
                        EmotionSet::from_raw_tokens(gold_raw), cfg);
    testing::BruteScore brute = testing::brute_ew_score(pred_raw, gold_raw, inst.raw_wheels);

    REQUIRE(lib.per_wheel_f.size() == brute.f.size());
    for (std::size_t w = 0; w < brute.f.size(); ++w) {
      CHECK(lib.per_wheel_precision[w] == doctest::Approx(brute.precision[w]).epsilon(1e-12));
      CHECK(lib.per_wheel_recall[w] == doctest::Approx(brute.recall[w]).epsilon(1e-12));
      CHECK(lib.per_wheel_f[w] == doctest::Approx(brute.f[w]).epsilon(1e-12));
    }
    CHECK(lib.ew == doctest::Approx(brute.ew).epsilon(1e-12));

    double lib_jaccard = jaccard_similarity(EmotionSet::from_raw_tokens(pred_raw),
                                            EmotionSet::from_raw_tokens(gold_raw), cfg);
    CHECK(lib_jaccard ==
          doctest::Approx(testing::brute_jaccard(pred_raw, gold_raw, inst.raw_wheels))
              .epsilon(1e-12));
  }
}

TEST_CASE("score properties on random instances") {
  std::mt19937_64 gen(7177);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = testing::make_instance(gen);
    EwConfig cfg = inst.config();
    EmotionSet pred =
        EmotionSet::from_raw_tokens(testing::pick_words(gen, inst.universe, 5, false));
    EmotionSet gold =
        EmotionSet::from_raw_tokens(testing::pick_words(gen, inst.universe, 5, false));

    SampleScore forward = ew_sample_score(pred, gold, cfg);
    SampleScore backward = ew_sample_score(gold, pred, cfg);

    // Swapping roles swaps precision and recall and preserves F.
    for (std::size_t w = 0; w < cfg.wheel_count(); ++w) {
      CHECK(forward.per_wheel_precision[w] ==
            doctest::Approx(backward.per_wheel_recall[w]).epsilon(1e-15));
      CHECK(forward.per_wheel_f[w] == doctest::Approx(backward.per_wheel_f[w]).epsilon(1e-15));
      CHECK(forward.per_wheel_precision[w] >= 0.0);
      CHECK(forward.per_wheel_precision[w] <= 1.0);
    }
    CHECK(forward.ew >= 0.0);
    CHECK(forward.ew <= 1.0);
    CHECK(jaccard_similarity(pred, gold, cfg) <= 1.0 + 1e-15);

    // Jaccard hits 1 exactly when the grouped sets agree on every wheel.
    bool grouped_equal = true;
    for (const auto& pipeline : inst.pipelines) {
      if (!(pipeline.group_set(pred) == pipeline.group_set(gold))) {
        grouped_equal = false;
        break;
      }
    }
    CHECK((jaccard_similarity(pred, gold, cfg) == 1.0) == grouped_equal);

    // A word that matches no gold group on any wheel lowers precision.
    int alien = -1;
    for (int i = 0; i < static_cast<int>(inst.universe.size()); ++i) {
      EmotionWord candidate(inst.universe[static_cast<std::size_t>(i)]);
      bool in_pred_groups = false;
      bool hits_gold = false;
      for (std::size_t w = 0; w < inst.pipelines.size(); ++w) {
        EmotionWord canon = inst.pipelines[w].canonicalize(candidate);
        if (inst.pipelines[w].group_set(gold).contains(canon)) hits_gold = true;
        if (inst.pipelines[w].group_set(pred).contains(canon)) in_pred_groups = true;
      }
      if (!hits_gold && !in_pred_groups) {
        alien = i;
        break;
      }
    }
    if (alien >= 0) {
      EmotionSet padded = pred;
      padded.insert(EmotionWord(inst.universe[static_cast<std::size_t>(alien)]));
      SampleScore worse = ew_sample_score(padded, gold, cfg);
      for (std::size_t w = 0; w < cfg.wheel_count(); ++w) {
        CHECK(worse.per_wheel_precision[w] < forward.per_wheel_precision[w] + 1e-15);
      }
      CHECK(worse.ew <= forward.ew + 1e-15);
    }
  }
}

TEST_CASE("synonym invariance: free words change nothing") {
  std::mt19937_64 gen(99551);
  int exercised = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = testing::make_instance(gen);
    EwConfig cfg = inst.config();
    EmotionSet pred =
        EmotionSet::from_raw_tokens(testing::pick_words(gen, inst.universe, 5, false));
    EmotionSet gold =
        EmotionSet::from_raw_tokens(testing::pick_words(gen, inst.universe, 5, false));

    for (int i = 0; i < static_cast<int>(inst.universe.size()); ++i) {
      EmotionWord base(inst.universe[static_cast<std::size_t>(i)]);
      if (!pred.contains(base)) continue;
      for (int synonym : inst.synonyms_of(i)) {
        EmotionSet padded = pred;
        padded.insert(EmotionWord(inst.universe[static_cast<std::size_t>(synonym)]));
        SampleScore before = ew_sample_score(pred, gold, cfg);
        SampleScore after = ew_sample_score(padded, gold, cfg);
        CHECK(before.ew == after.ew);  // exact: grouped sets are identical
        ++exercised;
      }
    }
  }
  CHECK(exercised > 50);
}
