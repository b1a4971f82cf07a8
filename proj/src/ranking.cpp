#include "ewreward/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace ewreward {

namespace {

constexpr double kThetaFloor = 1e-12;

struct PairCounts {
  int lo = 0;  // lo < hi
  int hi = 0;
  double lo_wins = 0.0;
  double hi_wins = 0.0;
  double ties = 0.0;
  double total() const { return lo_wins + hi_wins + ties; }
};

struct CountTable {
  std::vector<PairCounts> pairs;
  std::vector<double> wins;         // per item, against anyone
  std::vector<char> observed;      // appears in at least one record
};

CountTable tabulate(std::span<const PreferenceRecord> records, int n_items) {
  CountTable table;
  table.wins.assign(static_cast<std::size_t>(n_items), 0.0);
  table.observed.assign(static_cast<std::size_t>(n_items), 0);
  std::map<std::pair<int, int>, std::size_t> index;
  for (const auto& rec : records) {
    if (rec.i < 0 || rec.j < 0 || rec.i >= n_items || rec.j >= n_items) {
      throw std::invalid_argument("fit_bt: item index out of range");
    }
    if (rec.i == rec.j) {
      throw std::invalid_argument("fit_bt: record compares an item with itself");
    }
    int lo = std::min(rec.i, rec.j);
    int hi = std::max(rec.i, rec.j);
    auto [it, inserted] = index.try_emplace({lo, hi}, table.pairs.size());
    if (inserted) {
      table.pairs.push_back(PairCounts{lo, hi});
    }
    PairCounts& counts = table.pairs[it->second];
    table.observed[static_cast<std::size_t>(lo)] = 1;
    table.observed[static_cast<std::size_t>(hi)] = 1;
    switch (rec.outcome) {
      case Outcome::Tie:
        counts.ties += 1.0;
        break;
      case Outcome::IWins:
        (rec.i == lo ? counts.lo_wins : counts.hi_wins) += 1.0;
        table.wins[static_cast<std::size_t>(rec.i)] += 1.0;
        break;
      case Outcome::JWins:
        (rec.j == lo ? counts.lo_wins : counts.hi_wins) += 1.0;
        table.wins[static_cast<std::size_t>(rec.j)] += 1.0;
        break;
    }
  }
  return table;
}

double counts_log_likelihood(const CountTable& table, std::span<const double> theta,
                             double beta) {
  double ll = 0.0;
  for (const auto& p : table.pairs) {
    double ti = theta[static_cast<std::size_t>(p.lo)];
    double tj = theta[static_cast<std::size_t>(p.hi)];
    double denom = ti + tj + beta;
    if (p.lo_wins > 0.0) ll += p.lo_wins * std::log(ti);
    if (p.hi_wins > 0.0) ll += p.hi_wins * std::log(tj);
    if (p.ties > 0.0) ll += p.ties * std::log(beta);
    ll -= p.total() * std::log(denom);
  }
  return ll;
}

// Rescales the observed coordinates to sum to their count, with a positivity floor.
void project(std::vector<double>& theta, const std::vector<int>& observed_items) {
  double sum = 0.0;
  for (int i : observed_items) sum += theta[static_cast<std::size_t>(i)];
  double target = static_cast<double>(observed_items.size());
  double scale = target / sum;
  for (int i : observed_items) {
    double& t = theta[static_cast<std::size_t>(i)];
    t = std::max(t * scale, kThetaFloor);
  }
}

}  // namespace

std::array<double, 3> pair_probabilities(double theta_i, double theta_j, double beta) {
  if (!(theta_i > 0.0) || !(theta_j > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("pair_probabilities: parameters must be positive");
  }
  double denom = theta_i + theta_j + beta;
  return {theta_i / denom, theta_j / denom, beta / denom};
}

double bt_log_likelihood(std::span<const PreferenceRecord> records,
                         std::span<const double> theta, double beta) {
  int n_items = static_cast<int>(theta.size());
  return counts_log_likelihood(tabulate(records, n_items), theta, beta);
}

BtFit fit_bt(std::span<const PreferenceRecord> records, int n_items, const BtConfig& cfg) {
  if (n_items < 2) {
    throw std::invalid_argument("fit_bt: need at least two items");
  }
  if (!(cfg.beta > 0.0) || !(cfg.tolerance > 0.0)) {
    throw std::invalid_argument("fit_bt: beta and tolerance must be positive");
  }

  BtFit fit;
  fit.theta.assign(static_cast<std::size_t>(n_items), 1.0);

  CountTable table = tabulate(records, n_items);
  std::vector<int> observed_items;
  for (int i = 0; i < n_items; ++i) {
    if (table.observed[static_cast<std::size_t>(i)]) observed_items.push_back(i);
  }
  if (observed_items.empty()) {
    fit.degenerate = true;
    fit.converged = true;
    fit.log_likelihood_trace.push_back(0.0);
    return fit;
  }

  double ll = counts_log_likelihood(table, fit.theta, cfg.beta);
  fit.log_likelihood_trace.push_back(ll);

  std::vector<double> candidate(fit.theta.size());
  std::vector<double> trial(fit.theta.size());
  std::vector<double> gradient(fit.theta.size());

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // Per-item pairwise pressure S_i = sum_j n_ij / (theta_i + theta_j + beta).
    std::vector<double> pressure(fit.theta.size(), 0.0);
    for (const auto& p : table.pairs) {
      double denom = fit.theta[static_cast<std::size_t>(p.lo)] +
                     fit.theta[static_cast<std::size_t>(p.hi)] + cfg.beta;
      pressure[static_cast<std::size_t>(p.lo)] += p.total() / denom;
      pressure[static_cast<std::size_t>(p.hi)] += p.total() / denom;
    }

    // Multiplicative fixed-point candidate from the stationarity condition
    // theta_i = wins_i / S_i, floored so winless items stay positive.
    candidate = fit.theta;
    for (int i : observed_items) {
      auto idx = static_cast<std::size_t>(i);
      candidate[idx] = std::max(table.wins[idx] / std::max(pressure[idx], kThetaFloor),
                                kThetaFloor);
    }
    project(candidate, observed_items);

    // Damped step in log space, backtracking until the likelihood does not
    // decrease. Oscillating candidates fall through to a gradient step.
    bool accepted = false;
    double best_ll = ll;
    for (double step = 1.0; step >= 1.0 / 1024.0; step *= 0.5) {
      trial = fit.theta;
      for (int i : observed_items) {
        auto idx = static_cast<std::size_t>(i);
        trial[idx] = std::exp((1.0 - step) * std::log(fit.theta[idx]) +
                              step * std::log(candidate[idx]));
      }
      project(trial, observed_items);
      double trial_ll = counts_log_likelihood(table, trial, cfg.beta);
      if (trial_ll >= ll) {
        best_ll = trial_ll;
        accepted = true;
        break;
      }
    }

    if (!accepted) {
      // Projected gradient ascent on log theta along the constraint manifold.
      std::fill(gradient.begin(), gradient.end(), 0.0);
      for (int i : observed_items) {
        auto idx = static_cast<std::size_t>(i);
        gradient[idx] = table.wins[idx] / fit.theta[idx] - pressure[idx];
      }
      double mean_pull = 0.0;
      double mass = static_cast<double>(observed_items.size());
      for (int i : observed_items) {
        auto idx = static_cast<std::size_t>(i);
        mean_pull += gradient[idx] * fit.theta[idx];
      }
      mean_pull /= mass;
      for (double step = 1.0; step >= 1.0 / 65536.0; step *= 0.5) {
        trial = fit.theta;
        for (int i : observed_items) {
          auto idx = static_cast<std::size_t>(i);
          double direction = fit.theta[idx] * (gradient[idx] - mean_pull);
          trial[idx] = fit.theta[idx] * std::exp(step * direction / mass);
        }
        project(trial, observed_items);
        double trial_ll = counts_log_likelihood(table, trial, cfg.beta);
        if (trial_ll >= ll) {
          best_ll = trial_ll;
          accepted = true;
          break;
        }
      }
    }

    if (!accepted) {
      fit.converged = true;  // no ascent direction left at this resolution
      break;
    }

    double max_rel_change = 0.0;
    for (int i : observed_items) {
      auto idx = static_cast<std::size_t>(i);
      max_rel_change = std::max(max_rel_change,
                                std::abs(trial[idx] - fit.theta[idx]) / fit.theta[idx]);
    }
    fit.theta = trial;
    ll = best_ll;
    fit.iterations = iter + 1;
    fit.log_likelihood_trace.push_back(ll);

    if (max_rel_change < cfg.tolerance) {
      fit.converged = true;
      break;
    }
  }

  fit.log_likelihood = ll;
  return fit;
}

std::vector<int> rank_items(std::span<const double> theta) {
  std::vector<int> order(theta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double ta = theta[static_cast<std::size_t>(a)];
    double tb = theta[static_cast<std::size_t>(b)];
    if (ta != tb) return ta > tb;
    return a < b;
  });
  return order;
}

PreferenceRecord judgment_from_json_text(const std::string& line, const std::string& origin) {
  nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("i") || !doc.contains("j") ||
      !doc.contains("outcome") || !doc["i"].is_number_integer() ||
      !doc["j"].is_number_integer() || !doc["outcome"].is_string()) {
    throw std::runtime_error(origin + ": judgment line must be {\"i\", \"j\", \"outcome\"}");
  }
  PreferenceRecord rec;
  rec.i = doc["i"].get<int>();
  rec.j = doc["j"].get<int>();
  std::string outcome = doc["outcome"].get<std::string>();
  if (outcome == "i") {
    rec.outcome = Outcome::IWins;
  } else if (outcome == "j") {
    rec.outcome = Outcome::JWins;
  } else if (outcome == "tie") {
    rec.outcome = Outcome::Tie;
  } else {
    throw std::runtime_error(origin + ": outcome must be \"i\", \"j\" or \"tie\"");
  }
  return rec;
}

std::vector<PreferenceRecord> load_judgments(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<PreferenceRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(
        judgment_from_json_text(line, path.string() + ":" + std::to_string(line_no)));
  }
  return records;
}

}  // namespace ewreward
