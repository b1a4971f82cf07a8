#pragma once
// Emotion wheels and the three-stage word canonicalization pipeline:
// inflection folding (base forms), synonym unification, and wheel
// outer-to-inner grouping. All types are immutable after construction and
// all operations are pure, so everything here is safe to share across
// threads.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ewreward/words.hpp"

namespace ewreward {

// Stage-one and stage-two lookup tables. Values must be fixed points of
// their own map (applying a stage twice equals applying it once).
struct LexiconMaps {
  std::map<std::string, std::string> base_forms;  // variant -> base form
  std::map<std::string, std::string> synonyms;    // word -> unified word

  // Throws std::invalid_argument on malformed tokens or non-fixed-point values.
  void validate() const;
};

// One emotion wheel: outer (fine-grained) labels mapped onto inner (core)
// labels. Inner labels are their own group representatives.
class WheelSpec {
 public:
  WheelSpec(std::string name, std::map<std::string, std::string> outer_to_inner,
            std::set<std::string> inner_labels);

  const std::string& name() const { return name_; }
  const std::map<std::string, std::string>& outer_to_inner() const { return outer_to_inner_; }
  const std::set<std::string>& inner_labels() const { return inner_labels_; }

  // Inner labels map to themselves; unknown labels pass through unchanged.
  const std::string& to_inner(const std::string& label) const;

 private:
  std::string name_;
  std::map<std::string, std::string> outer_to_inner_;
  std::set<std::string> inner_labels_;
};

// Wheel file schema: {"name": string, "inner_to_outer": {inner: [outer, ...]}}.
WheelSpec load_wheel(const std::filesystem::path& path);
WheelSpec wheel_from_json_text(const std::string& text, const std::string& origin = "<memory>");

// Lexicon file schema: {"base_forms": {variant: base}, "synonyms": {word: canonical}}.
LexiconMaps load_lexicon(const std::filesystem::path& path);
LexiconMaps lexicon_from_json_text(const std::string& text, const std::string& origin = "<memory>");

// The composed canonicalization function for one wheel. Construction checks
// that the composition is idempotent over the finite support of its maps, so
// canonical forms are always fixed points.
class GroupingPipeline {
 public:
  GroupingPipeline(LexiconMaps maps, WheelSpec wheel);

  const LexiconMaps& maps() const { return maps_; }
  const WheelSpec& wheel() const { return wheel_; }

  // Base form, then synonym, then wheel grouping. Words absent from every
  // map pass through each stage unchanged; total on all inputs.
  EmotionWord canonicalize(const EmotionWord& word) const;

  // Canonicalizes every member and collapses duplicates.
  EmotionSet group_set(const EmotionSet& words) const;

  // Every token the pipeline knows about: map keys and values, wheel labels.
  std::vector<std::string> known_tokens() const;

 private:
  std::string canonical_text(const std::string& word) const;

  LexiconMaps maps_;
  WheelSpec wheel_;
};

}  // namespace ewreward
