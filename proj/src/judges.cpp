#include "ewreward/judges.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "ewreward/rng.hpp"

namespace ewreward {

namespace {

using nlohmann::json;

// Instruction sent alongside extraction requests so a generic LLM endpoint
// can serve the protocol without server-side configuration.
constexpr const char* kExtractionInstruction =
    "You are an expert on human emotion. From the clues below, identify the "
    "character's emotional states. Reply with a JSON list of emotion words, "
    "clearly identifiable categories only, or an empty list if none.";

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '\'';
}

}  // namespace

EmotionSet lexicon_extract(const std::string& text, const EmotionSet& vocabulary) {
  EmotionSet found;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!word_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    while (i < text.size() && word_char(text[i])) ++i;
    std::string token = text.substr(begin, i - begin);
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (auto word = EmotionWord::normalized(token); word && vocabulary.contains(*word)) {
      found.insert(*word);
    }
  }
  return found;
}

LexiconExtractor LexiconExtractor::from_config(const EwConfig& cfg) {
  EmotionSet vocabulary;
  for (const auto& pipeline : cfg.pipelines()) {
    for (const auto& token : pipeline.known_tokens()) {
      if (auto word = EmotionWord::normalized(token)) {
        vocabulary.insert(*word);
      }
    }
  }
  return LexiconExtractor(std::move(vocabulary));
}

ScriptedJudge::ScriptedJudge(std::map<std::string, double> hidden_quality,
                             std::uint64_t noise_seed, double flip_probability)
    : hidden_quality_(std::move(hidden_quality)),
      noise_seed_(noise_seed),
      flip_probability_(flip_probability) {
  if (flip_probability_ < 0.0 || flip_probability_ >= 0.5) {
    throw std::invalid_argument("ScriptedJudge: flip_probability must be in [0, 0.5)");
  }
}

double ScriptedJudge::quality(const std::string& description) const {
  auto hit = hidden_quality_.find(description);
  return hit == hidden_quality_.end() ? 0.0 : hit->second;
}

Preference ScriptedJudge::compare(const std::string& context, const std::string& a,
                                  const std::string& b) const {
  (void)context;  // opaque; preferences depend only on the descriptions
  double qa = quality(a);
  double qb = quality(b);
  if (qa == qb) return Preference::Tie;

  bool flip = false;
  if (flip_probability_ > 0.0) {
    // One coin per unordered pair keeps compare antisymmetric under swaps.
    std::uint64_t ha = rng::fnv1a(a);
    std::uint64_t hb = rng::fnv1a(b);
    std::uint64_t x = rng::splitmix64(noise_seed_ ^ std::min(ha, hb));
    x = rng::splitmix64(x ^ std::max(ha, hb));
    double u = static_cast<double>(x >> 11) * 0x1.0p-53;
    flip = u < flip_probability_;
  }
  bool a_preferred = (qa > qb) != flip;
  return a_preferred ? Preference::A : Preference::B;
}

RemoteJudgeClient::RemoteJudgeClient(std::string endpoint, int timeout_ms)
    : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {
  if (endpoint_.empty()) {
    throw std::invalid_argument("RemoteJudgeClient: empty endpoint");
  }
  if (timeout_ms_ <= 0) {
    throw std::invalid_argument("RemoteJudgeClient: timeout must be positive");
  }
}

RemoteJudgeClient::~RemoteJudgeClient() = default;

std::unique_ptr<RemoteJudgeClient> RemoteJudgeClient::from_env() {
  const char* endpoint = std::getenv(kJudgeEndpointEnv);
  if (endpoint == nullptr || *endpoint == '\0') return nullptr;
  int timeout_ms = 10000;
  if (const char* raw = std::getenv(kJudgeTimeoutEnv); raw != nullptr && *raw != '\0') {
    timeout_ms = std::atoi(raw);
    if (timeout_ms <= 0) {
      throw std::invalid_argument(std::string(kJudgeTimeoutEnv) + " must be a positive integer");
    }
  }
  return std::make_unique<RemoteJudgeClient>(endpoint, timeout_ms);
}

std::string RemoteJudgeClient::post_json(const std::string& body) const {
  httplib::Client client(endpoint_);
  client.set_connection_timeout(0, timeout_ms_ * 1000);
  client.set_read_timeout(0, timeout_ms_ * 1000);
  client.set_write_timeout(0, timeout_ms_ * 1000);

  auto res = client.Post("/", body, "application/json");
  if (!res) {
    throw TransportError("judge endpoint " + endpoint_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("judge endpoint " + endpoint_ + ": HTTP " +
                         std::to_string(res->status));
  }
  return res->body;
}

EmotionSet RemoteJudgeClient::extract(const std::string& text) const {
  json request = {{"task", "extract"}, {"prompt", kExtractionInstruction}, {"text", text}};
  std::string body = post_json(request.dump());

  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("emotions") ||
      !doc["emotions"].is_array()) {
    throw MalformedResponseError("extract response must be {\"emotions\": [..]}, got: " + body);
  }
  EmotionSet out;
  for (const auto& item : doc["emotions"]) {
    if (!item.is_string()) {
      throw MalformedResponseError("extract response contains a non-string emotion: " + body);
    }
    if (auto word = EmotionWord::normalized(item.get<std::string>())) {
      out.insert(*word);
    }
  }
  return out;
}

Preference RemoteJudgeClient::compare(const std::string& context, const std::string& a,
                                      const std::string& b) const {
  json request = {{"task", "compare"}, {"context", context}, {"a", a}, {"b", b}};
  std::string body = post_json(request.dump());

  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("winner") ||
      !doc["winner"].is_string()) {
    throw MalformedResponseError("compare response must be {\"winner\": ..}, got: " + body);
  }
  std::string winner = doc["winner"].get<std::string>();
  if (winner == "a") return Preference::A;
  if (winner == "b") return Preference::B;
  if (winner == "tie") return Preference::Tie;
  throw MalformedResponseError("compare winner must be \"a\", \"b\" or \"tie\", got: " + body);
}

}  // namespace ewreward
