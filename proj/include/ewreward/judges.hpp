#pragma once
// Pluggable judge contracts: emotion-word extraction from reasoning text and
// pairwise preference between two descriptions. Ships deterministic in-repo
// implementations plus an HTTP client speaking a small JSON protocol, so an
// external model can stand behind the same interfaces.

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "ewreward/metrics.hpp"
#include "ewreward/words.hpp"

namespace ewreward {

enum class Preference { A, B, Tie };

class EmotionExtractor {
 public:
  virtual ~EmotionExtractor() = default;
  virtual EmotionSet extract(const std::string& text) const = 0;
  // Implementations safe for concurrent calls return true; the reward layer
  // serializes calls otherwise.
  virtual bool reentrant() const { return true; }
};

class PreferenceJudge {
 public:
  virtual ~PreferenceJudge() = default;
  virtual Preference compare(const std::string& context, const std::string& a,
                             const std::string& b) const = 0;
  virtual bool reentrant() const { return true; }
};

// Whole-word vocabulary matching against normalized text. No stemming here;
// inflections are the lexicon's job.
EmotionSet lexicon_extract(const std::string& text, const EmotionSet& vocabulary);

class LexiconExtractor : public EmotionExtractor {
 public:
  explicit LexiconExtractor(EmotionSet vocabulary) : vocabulary_(std::move(vocabulary)) {}

  // Vocabulary = every word and label the wheel configuration knows about.
  static LexiconExtractor from_config(const EwConfig& cfg);

  EmotionSet extract(const std::string& text) const override {
    return lexicon_extract(text, vocabulary_);
  }
  const EmotionSet& vocabulary() const { return vocabulary_; }

 private:
  EmotionSet vocabulary_;
};

// Deterministic preference oracle: prefers the description with higher
// hidden quality, optionally inverting strict preferences with a seeded
// per-unordered-pair coin. Antisymmetric by construction.
class ScriptedJudge : public PreferenceJudge {
 public:
  ScriptedJudge(std::map<std::string, double> hidden_quality, std::uint64_t noise_seed = 0,
                double flip_probability = 0.0);

  Preference compare(const std::string& context, const std::string& a,
                     const std::string& b) const override;

  double quality(const std::string& description) const;

 private:
  std::map<std::string, double> hidden_quality_;
  std::uint64_t noise_seed_;
  double flip_probability_;
};

struct JudgeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Endpoint unreachable, timed out, or returned a non-200 status.
struct TransportError : JudgeError {
  using JudgeError::JudgeError;
};
// Endpoint answered but the body violates the protocol.
struct MalformedResponseError : JudgeError {
  using JudgeError::JudgeError;
};

// JSON-over-HTTP client for both judge roles. Request bodies:
//   {"task": "extract", "prompt": <instruction>, "text": <reasoning span>}
//     -> {"emotions": ["happy", ...]}
//   {"task": "compare", "context": <opaque>, "a": <desc>, "b": <desc>}
//     -> {"winner": "a" | "b" | "tie"}
// Every call observes the configured timeout and surfaces failures as
// TransportError or MalformedResponseError.
class RemoteJudgeClient : public EmotionExtractor, public PreferenceJudge {
 public:
  explicit RemoteJudgeClient(std::string endpoint, int timeout_ms = 10000);
  ~RemoteJudgeClient() override;

  // Reads EWR_JUDGE_ENDPOINT and EWR_JUDGE_TIMEOUT_MS; nullptr when unset.
  static std::unique_ptr<RemoteJudgeClient> from_env();

  EmotionSet extract(const std::string& text) const override;
  Preference compare(const std::string& context, const std::string& a,
                     const std::string& b) const override;
  bool reentrant() const override { return true; }

  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string post_json(const std::string& body) const;

  std::string endpoint_;
  int timeout_ms_;
};

// Environment variable names for the remote judge.
inline constexpr const char* kJudgeEndpointEnv = "EWR_JUDGE_ENDPOINT";
inline constexpr const char* kJudgeTimeoutEnv = "EWR_JUDGE_TIMEOUT_MS";

}  // namespace ewreward
