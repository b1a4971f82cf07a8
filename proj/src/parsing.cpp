#include "ewreward/parsing.hpp"

#include <optional>
#include <vector>

namespace ewreward {

namespace {

std::vector<std::size_t> find_all(std::string_view text, std::string_view needle) {
  std::vector<std::size_t> hits;
  std::size_t pos = text.find(needle);
  while (pos != std::string_view::npos) {
    hits.push_back(pos);
    pos = text.find(needle, pos + 1);
  }
  return hits;
}

struct Block {
  std::size_t open_pos;   // index of the opening tag
  std::size_t close_pos;  // index of the closing tag
  std::string content;
};

// A block is valid only when both tags occur exactly once, in order.
std::optional<Block> exactly_one_block(std::string_view text, std::string_view open,
                                       std::string_view close) {
  auto opens = find_all(text, open);
  auto closes = find_all(text, close);
  if (opens.size() != 1 || closes.size() != 1) return std::nullopt;
  if (closes[0] < opens[0] + open.size()) return std::nullopt;
  std::size_t begin = opens[0] + open.size();
  return Block{opens[0], closes[0], std::string(text.substr(begin, closes[0] - begin))};
}

}  // namespace

ParsedOutput parse_output(std::string_view raw, bool require_think) {
  ParsedOutput out;

  auto answer = exactly_one_block(raw, "<answer>", "</answer>");
  if (!answer) return out;

  auto think = exactly_one_block(raw, "<think>", "</think>");
  bool think_before_answer = think && think->close_pos < answer->open_pos;

  if (require_think && !think_before_answer) return out;

  out.well_formed = true;
  out.answer_text = answer->content;
  out.answer_words = split_word_list(out.answer_text);
  if (think_before_answer) {
    out.think_text = think->content;
  }
  return out;
}

int format_reward(const ParsedOutput& parsed) {
  return parsed.well_formed ? 1 : 0;
}

}  // namespace ewreward
