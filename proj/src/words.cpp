#include "ewreward/words.hpp"

#include <algorithm>
#include <cctype>

namespace ewreward {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::string normalize_token(std::string_view raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && is_space(raw[begin])) ++begin;
  while (end > begin && is_space(raw[end - 1])) --end;

  std::string out;
  out.reserve(end - begin);
  bool pending_gap = false;
  for (std::size_t i = begin; i < end; ++i) {
    char c = raw[i];
    if (is_space(c)) {
      pending_gap = true;
      continue;
    }
    if (pending_gap) {
      out.push_back('-');
      pending_gap = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::optional<EmotionWord> EmotionWord::normalized(std::string_view raw) {
  std::string text = normalize_token(raw);
  if (text.empty()) return std::nullopt;
  return EmotionWord(std::move(text), already_normalized_t{});
}

EmotionWord::EmotionWord(std::string text) {
  std::string canon = normalize_token(text);
  if (canon.empty()) {
    throw std::invalid_argument("EmotionWord: empty token");
  }
  if (canon != text) {
    throw std::invalid_argument("EmotionWord: token '" + text + "' is not normalized");
  }
  text_ = std::move(canon);
}

EmotionSet::EmotionSet(std::vector<EmotionWord> words) : words_(std::move(words)) {
  std::sort(words_.begin(), words_.end());
  words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
}

EmotionSet EmotionSet::from_raw_tokens(const std::vector<std::string>& raw) {
  EmotionSet out;
  for (const auto& token : raw) {
    if (auto word = EmotionWord::normalized(token)) {
      out.insert(*word);
    }
  }
  return out;
}

void EmotionSet::insert(const EmotionWord& word) {
  auto it = std::lower_bound(words_.begin(), words_.end(), word);
  if (it == words_.end() || *it != word) {
    words_.insert(it, word);
  }
}

bool EmotionSet::contains(const EmotionWord& word) const {
  return std::binary_search(words_.begin(), words_.end(), word);
}

std::vector<std::string> EmotionSet::texts() const {
  std::vector<std::string> out;
  out.reserve(words_.size());
  for (const auto& w : words_) out.push_back(w.text());
  return out;
}

EmotionSet set_union(const EmotionSet& a, const EmotionSet& b) {
  std::vector<EmotionWord> merged;
  merged.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
  return EmotionSet(std::move(merged));
}

EmotionSet set_intersection(const EmotionSet& a, const EmotionSet& b) {
  std::vector<EmotionWord> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return EmotionSet(std::move(common));
}

std::size_t intersection_size(const EmotionSet& a, const EmotionSet& b) {
  std::size_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

std::size_t union_size(const EmotionSet& a, const EmotionSet& b) {
  return a.size() + b.size() - intersection_size(a, b);
}

EmotionSet split_word_list(std::string_view text) {
  EmotionSet out;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    if (auto word = EmotionWord::normalized(text.substr(start, end - start))) {
      out.insert(*word);
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == ',' || c == ';' || c == '\n') {
      flush(i);
      start = i + 1;
    }
  }
  flush(text.size());
  return out;
}

}  // namespace ewreward
