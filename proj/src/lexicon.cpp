#include "ewreward/lexicon.hpp"

#include <stdexcept>

#include <json.hpp>

#include "ewreward/io.hpp"

namespace ewreward {

namespace {

using nlohmann::json;

std::string require_token(const std::string& raw, const std::string& what) {
  std::string token = normalize_token(raw);
  if (token.empty()) {
    throw std::invalid_argument(what + ": empty token '" + raw + "'");
  }
  return token;
}

void validate_fixed_points(const std::map<std::string, std::string>& map,
                           const std::string& what) {
  for (const auto& [key, value] : map) {
    auto hit = map.find(value);
    if (hit != map.end() && hit->second != value) {
      throw std::invalid_argument(what + ": value '" + value +
                                  "' is not a fixed point (maps on to '" + hit->second + "')");
    }
    (void)key;
  }
}

json parse_json(const std::string& text, const std::string& origin) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw std::runtime_error(origin + ": not valid JSON");
  }
  return doc;
}

}  // namespace

void LexiconMaps::validate() const {
  for (const auto* map : {&base_forms, &synonyms}) {
    for (const auto& [key, value] : *map) {
      if (normalize_token(key) != key || key.empty()) {
        throw std::invalid_argument("lexicon: key '" + key + "' is not normalized");
      }
      if (normalize_token(value) != value || value.empty()) {
        throw std::invalid_argument("lexicon: value '" + value + "' is not normalized");
      }
    }
  }
  validate_fixed_points(base_forms, "lexicon base_forms");
  validate_fixed_points(synonyms, "lexicon synonyms");
}

WheelSpec::WheelSpec(std::string name, std::map<std::string, std::string> outer_to_inner,
                     std::set<std::string> inner_labels)
    : name_(std::move(name)),
      outer_to_inner_(std::move(outer_to_inner)),
      inner_labels_(std::move(inner_labels)) {
  if (name_.empty()) {
    throw std::invalid_argument("wheel: empty name");
  }
  for (const auto& inner : inner_labels_) {
    if (normalize_token(inner) != inner || inner.empty()) {
      throw std::invalid_argument("wheel '" + name_ + "': inner label '" + inner +
                                  "' is not normalized");
    }
    auto hit = outer_to_inner_.find(inner);
    if (hit != outer_to_inner_.end() && hit->second != inner) {
      throw std::invalid_argument("wheel '" + name_ + "': inner label '" + inner +
                                  "' is re-mapped to '" + hit->second + "'");
    }
  }
  for (const auto& [outer, inner] : outer_to_inner_) {
    if (normalize_token(outer) != outer || outer.empty()) {
      throw std::invalid_argument("wheel '" + name_ + "': outer label '" + outer +
                                  "' is not normalized");
    }
    if (!inner_labels_.contains(inner)) {
      throw std::invalid_argument("wheel '" + name_ + "': outer label '" + outer +
                                  "' maps to unknown inner label '" + inner + "'");
    }
  }
}

const std::string& WheelSpec::to_inner(const std::string& label) const {
  auto hit = outer_to_inner_.find(label);
  if (hit != outer_to_inner_.end()) return hit->second;
  return label;
}

WheelSpec wheel_from_json_text(const std::string& text, const std::string& origin) {
  json doc = parse_json(text, origin);
  if (!doc.is_object() || !doc.contains("name") || !doc.contains("inner_to_outer") ||
      !doc["name"].is_string() || !doc["inner_to_outer"].is_object()) {
    throw std::runtime_error(origin +
                             ": wheel must be {\"name\": string, \"inner_to_outer\": object}");
  }
  std::map<std::string, std::string> outer_to_inner;
  std::set<std::string> inner_labels;
  for (const auto& [inner_raw, outers] : doc["inner_to_outer"].items()) {
    std::string inner = require_token(inner_raw, origin + ": inner label");
    if (!inner_labels.insert(inner).second) {
      throw std::runtime_error(origin + ": duplicate inner label '" + inner + "'");
    }
    if (!outers.is_array()) {
      throw std::runtime_error(origin + ": outer labels of '" + inner + "' must be an array");
    }
    for (const auto& outer_raw : outers) {
      if (!outer_raw.is_string()) {
        throw std::runtime_error(origin + ": outer label under '" + inner +
                                 "' must be a string");
      }
      std::string outer = require_token(outer_raw.get<std::string>(), origin + ": outer label");
      auto [it, inserted] = outer_to_inner.emplace(outer, inner);
      if (!inserted && it->second != inner) {
        throw std::runtime_error(origin + ": outer label '" + outer +
                                 "' appears under two inner labels");
      }
    }
  }
  if (inner_labels.empty()) {
    throw std::runtime_error(origin + ": wheel has no inner labels");
  }
  return WheelSpec(doc["name"].get<std::string>(), std::move(outer_to_inner),
                   std::move(inner_labels));
}

WheelSpec load_wheel(const std::filesystem::path& path) {
  return wheel_from_json_text(read_text_file(path), path.string());
}

LexiconMaps lexicon_from_json_text(const std::string& text, const std::string& origin) {
  json doc = parse_json(text, origin);
  if (!doc.is_object()) {
    throw std::runtime_error(origin + ": lexicon must be a JSON object");
  }
  LexiconMaps maps;
  auto read_map = [&](const char* key, std::map<std::string, std::string>& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_object()) {
      throw std::runtime_error(origin + ": '" + key + "' must be an object");
    }
    for (const auto& [k, v] : doc[key].items()) {
      if (!v.is_string()) {
        throw std::runtime_error(origin + ": '" + key + "." + k + "' must be a string");
      }
      out[require_token(k, origin)] = require_token(v.get<std::string>(), origin);
    }
  };
  read_map("base_forms", maps.base_forms);
  read_map("synonyms", maps.synonyms);
  maps.validate();
  return maps;
}

LexiconMaps load_lexicon(const std::filesystem::path& path) {
  return lexicon_from_json_text(read_text_file(path), path.string());
}

GroupingPipeline::GroupingPipeline(LexiconMaps maps, WheelSpec wheel)
    : maps_(std::move(maps)), wheel_(std::move(wheel)) {
  maps_.validate();
  // Canonical forms must be fixed points of the whole composition, otherwise
  // repeated grouping could keep moving words around. Checking every token
  // the maps mention covers all reachable outputs; unknown words are fixed
  // points trivially.
  for (const auto& token : known_tokens()) {
    std::string once = canonical_text(token);
    std::string twice = canonical_text(once);
    if (once != twice) {
      throw std::invalid_argument("grouping pipeline for wheel '" + wheel_.name() +
                                  "' is not idempotent: '" + token + "' -> '" + once +
                                  "' -> '" + twice + "'");
    }
  }
}

std::string GroupingPipeline::canonical_text(const std::string& word) const {
  const std::string* current = &word;
  if (auto hit = maps_.base_forms.find(*current); hit != maps_.base_forms.end()) {
    current = &hit->second;
  }
  if (auto hit = maps_.synonyms.find(*current); hit != maps_.synonyms.end()) {
    current = &hit->second;
  }
  return wheel_.to_inner(*current);
}

EmotionWord GroupingPipeline::canonicalize(const EmotionWord& word) const {
  return EmotionWord(canonical_text(word.text()));
}

EmotionSet GroupingPipeline::group_set(const EmotionSet& words) const {
  EmotionSet out;
  for (const auto& w : words) {
    out.insert(canonicalize(w));
  }
  return out;
}

std::vector<std::string> GroupingPipeline::known_tokens() const {
  std::set<std::string> tokens;
  for (const auto* map : {&maps_.base_forms, &maps_.synonyms}) {
    for (const auto& [k, v] : *map) {
      tokens.insert(k);
      tokens.insert(v);
    }
  }
  for (const auto& [outer, inner] : wheel_.outer_to_inner()) {
    tokens.insert(outer);
    tokens.insert(inner);
  }
  for (const auto& inner : wheel_.inner_labels()) {
    tokens.insert(inner);
  }
  return {tokens.begin(), tokens.end()};
}

}  // namespace ewreward
