#pragma once
// Emotion word normalization and duplicate-free word sets. The single
// canonical surface form used everywhere else: lowercase, trimmed, internal
// whitespace collapsed to one hyphen.

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ewreward {

// One normalized emotion token. Never empty, never mixed-case, never
// contains whitespace (hyphens stand in for internal spaces).
class EmotionWord {
 public:
  // Normalizes an arbitrary raw token; nullopt when nothing survives trimming.
  static std::optional<EmotionWord> normalized(std::string_view raw);

  // Accepts only already-normalized text; throws std::invalid_argument otherwise.
  explicit EmotionWord(std::string text);

  const std::string& text() const { return text_; }

  auto operator<=>(const EmotionWord&) const = default;

 private:
  struct already_normalized_t {};
  EmotionWord(std::string text, already_normalized_t) : text_(std::move(text)) {}

  std::string text_;
};

// Lowercase + trim + collapse internal whitespace runs to a single hyphen.
// Returns the empty string when the input is all whitespace.
std::string normalize_token(std::string_view raw);

// A finite duplicate-free collection of EmotionWord, kept sorted so that
// iteration order (and everything serialized from it) is deterministic.
class EmotionSet {
 public:
  EmotionSet() = default;
  explicit EmotionSet(std::vector<EmotionWord> words);

  // Normalizes each raw token, drops empties, removes duplicates.
  static EmotionSet from_raw_tokens(const std::vector<std::string>& raw);

  void insert(const EmotionWord& word);
  bool contains(const EmotionWord& word) const;

  bool empty() const { return words_.empty(); }
  std::size_t size() const { return words_.size(); }
  const std::vector<EmotionWord>& words() const { return words_; }

  std::vector<std::string> texts() const;

  auto begin() const { return words_.begin(); }
  auto end() const { return words_.end(); }

  bool operator==(const EmotionSet&) const = default;

 private:
  std::vector<EmotionWord> words_;  // sorted, unique
};

EmotionSet set_union(const EmotionSet& a, const EmotionSet& b);
EmotionSet set_intersection(const EmotionSet& a, const EmotionSet& b);
std::size_t intersection_size(const EmotionSet& a, const EmotionSet& b);
std::size_t union_size(const EmotionSet& a, const EmotionSet& b);

// Splits a free-form answer list on commas, semicolons and newlines, then
// normalizes and deduplicates the pieces.
EmotionSet split_word_list(std::string_view text);

}  // namespace ewreward
