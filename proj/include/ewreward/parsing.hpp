#pragma once
// Splits raw model output into its reasoning and answer spans and derives
// the answer word set. Tag grammar: case-sensitive literal <think>/<answer>
// blocks, each appearing exactly once, think strictly before answer; text
// outside the blocks is tolerated and ignored.

#include <string>
#include <string_view>

#include "ewreward/words.hpp"

namespace ewreward {

struct ParsedOutput {
  std::string think_text;   // empty when absent or malformed
  std::string answer_text;  // raw span between the answer tags
  EmotionSet answer_words;  // split on , ; and newlines, normalized, deduped
  bool well_formed = false;
};

// When require_think is set the reasoning block is mandatory and must close
// before the answer block opens. Malformed input never throws; it yields
// well_formed = false with empty spans.
ParsedOutput parse_output(std::string_view raw, bool require_think);

// 1 iff the output matched the required tag structure.
int format_reward(const ParsedOutput& parsed);

}  // namespace ewreward
