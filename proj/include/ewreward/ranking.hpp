#pragma once
// Bradley-Terry model with ties. Pairwise win/lose/tie observations are
// fitted to positive item strengths theta by constrained maximum likelihood
// (sum of theta pinned to the item count, tie mass beta held fixed), then
// items are ranked by strength.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ewreward {

enum class Outcome { IWins, JWins, Tie };

struct PreferenceRecord {
  int i = 0;
  int j = 0;
  Outcome outcome = Outcome::Tie;
};

struct BtConfig {
  double beta = 1.0;        // tie mass; larger values make ties more likely
  int max_iters = 500;
  double tolerance = 1e-8;  // max relative strength change at convergence
};

struct BtFit {
  std::vector<double> theta;        // positive, sums to the item count
  bool degenerate = false;          // no records at all: uniform prior returned
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
  // Log-likelihood after each accepted iteration; non-decreasing by
  // construction (every step is line-searched).
  std::vector<double> log_likelihood_trace;
};

// Win/lose/tie probabilities for one ordered pair.
// Throws std::invalid_argument on non-positive parameters.
std::array<double, 3> pair_probabilities(double theta_i, double theta_j, double beta);

// Log-likelihood of the observations under the tie model.
double bt_log_likelihood(std::span<const PreferenceRecord> records,
                         std::span<const double> theta, double beta);

// Maximum-likelihood strengths. Items never mentioned in the records keep
// the prior strength 1; observed items are normalized so their strengths sum
// to the observed-item count, keeping the overall sum equal to n_items.
BtFit fit_bt(std::span<const PreferenceRecord> records, int n_items, const BtConfig& cfg = {});

// Indices sorted by strength descending; ties broken by ascending index.
std::vector<int> rank_items(std::span<const double> theta);

// Judgment log: JSONL lines {"i": int, "j": int, "outcome": "i"|"j"|"tie"}.
std::vector<PreferenceRecord> load_judgments(const std::filesystem::path& path);
PreferenceRecord judgment_from_json_text(const std::string& line, const std::string& origin);

}  // namespace ewreward
