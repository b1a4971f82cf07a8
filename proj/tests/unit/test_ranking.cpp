#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "ewreward/ranking.hpp"
#include "ewreward/rng.hpp"
#include "support/stats.hpp"

using namespace ewreward;

TEST_CASE("pair probabilities") {
  auto even = pair_probabilities(1.0, 1.0, 1.0);
  CHECK(even[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(even[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(even[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  auto skewed = pair_probabilities(2.0, 1.0, 1.0);
  CHECK(skewed[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(skewed[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(skewed[2] == doctest::Approx(0.25).epsilon(1e-15));

  std::mt19937_64 gen(55);
  for (int trial = 0; trial < 100; ++trial) {
    double ti = rng::uniform_range(gen, 0.01, 5.0);
    double tj = rng::uniform_range(gen, 0.01, 5.0);
    double beta = rng::uniform_range(gen, 0.01, 3.0);
    auto p = pair_probabilities(ti, tj, beta);
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-12));
    // Joint rescaling of strengths and tie mass changes nothing.
    double c = rng::uniform_range(gen, 0.1, 10.0);
    auto scaled = pair_probabilities(c * ti, c * tj, c * beta);
    for (int k = 0; k < 3; ++k) {
      CHECK(p[static_cast<std::size_t>(k)] ==
            doctest::Approx(scaled[static_cast<std::size_t>(k)]).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(pair_probabilities(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(pair_probabilities(1.0, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("all ties keep strengths uniform") {
  std::vector<PreferenceRecord> records(10, PreferenceRecord{0, 1, Outcome::Tie});
  BtFit fit = fit_bt(records, 2);
  CHECK(fit.theta[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.theta[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(fit.degenerate);
}

TEST_CASE("repeated wins push the winner's strength up") {
  std::vector<PreferenceRecord> records(10, PreferenceRecord{0, 1, Outcome::IWins});
  BtConfig cfg;
  cfg.beta = 0.1;
  BtFit fit = fit_bt(records, 2, cfg);
  CHECK(fit.theta[0] > fit.theta[1]);
  CHECK(rank_items(fit.theta) == std::vector<int>{0, 1});

  // The fit must beat the uniform starting point and random feasible points.
  std::vector<double> uniform{1.0, 1.0};
  double fitted_ll = bt_log_likelihood(records, fit.theta, cfg.beta);
  CHECK(fitted_ll >= bt_log_likelihood(records, uniform, cfg.beta) - 1e-12);
  std::mt19937_64 gen(808);
  for (int trial = 0; trial < 100; ++trial) {
    double x = rng::uniform_range(gen, 1e-6, 2.0 - 1e-6);
    std::vector<double> point{x, 2.0 - x};
    CHECK(fitted_ll >= bt_log_likelihood(records, point, cfg.beta) - 1e-9);
  }
}

TEST_CASE("relabeling items permutes the fit") {
  std::vector<PreferenceRecord> records{
      {0, 1, Outcome::IWins}, {0, 2, Outcome::IWins}, {1, 2, Outcome::Tie},
      {0, 1, Outcome::IWins}, {1, 2, Outcome::JWins},
  };
  BtFit fit = fit_bt(records, 3);

  // Swap labels 0 <-> 2 everywhere.
  std::vector<PreferenceRecord> swapped;
  for (auto rec : records) {
    rec.i = rec.i == 0 ? 2 : rec.i == 2 ? 0 : rec.i;
    rec.j = rec.j == 0 ? 2 : rec.j == 2 ? 0 : rec.j;
    swapped.push_back(rec);
  }
  BtFit refit = fit_bt(swapped, 3);
  CHECK(refit.theta[2] == doctest::Approx(fit.theta[0]).epsilon(1e-7));
  CHECK(refit.theta[1] == doctest::Approx(fit.theta[1]).epsilon(1e-7));
  CHECK(refit.theta[0] == doctest::Approx(fit.theta[2]).epsilon(1e-7));
}

TEST_CASE("log-likelihood never decreases across iterations") {
  std::mt19937_64 gen(4711);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 3 + static_cast<int>(rng::uniform_index(gen, 5));
    std::vector<PreferenceRecord> records;
    int count = 5 + static_cast<int>(rng::uniform_index(gen, 60));
    for (int k = 0; k < count; ++k) {
      int i = static_cast<int>(rng::uniform_index(gen, static_cast<std::size_t>(n)));
      int j = static_cast<int>(rng::uniform_index(gen, static_cast<std::size_t>(n)));
      if (i == j) continue;
      double u = rng::uniform01(gen);
      Outcome outcome = u < 0.4 ? Outcome::IWins : u < 0.8 ? Outcome::JWins : Outcome::Tie;
      records.push_back({i, j, outcome});
    }
    if (records.empty()) continue;
    BtFit fit = fit_bt(records, n);
    for (std::size_t k = 1; k < fit.log_likelihood_trace.size(); ++k) {
      CHECK(fit.log_likelihood_trace[k] >= fit.log_likelihood_trace[k - 1] - 1e-12);
    }
    double sum = 0.0;
    for (double t : fit.theta) {
      CHECK(t > 0.0);
      sum += t;
    }
    CHECK(sum == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
  }
}

TEST_CASE("an extra win never hurts the winner") {
  std::mt19937_64 gen(92);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 3 + static_cast<int>(rng::uniform_index(gen, 3));
    std::vector<PreferenceRecord> records;
    for (int k = 0; k < 25; ++k) {
      int i = static_cast<int>(rng::uniform_index(gen, static_cast<std::size_t>(n)));
      int j = static_cast<int>(rng::uniform_index(gen, static_cast<std::size_t>(n)));
      if (i == j) continue;
      double u = rng::uniform01(gen);
      Outcome outcome = u < 0.45 ? Outcome::IWins : u < 0.9 ? Outcome::JWins : Outcome::Tie;
      records.push_back({i, j, outcome});
    }
    if (records.empty()) continue;
    int lucky = static_cast<int>(rng::uniform_index(gen, static_cast<std::size_t>(n)));
    int other = (lucky + 1) % n;

    BtFit before = fit_bt(records, n);
    records.push_back({lucky, other, Outcome::IWins});
    BtFit after = fit_bt(records, n);
    CHECK(after.theta[static_cast<std::size_t>(lucky)] >=
          before.theta[static_cast<std::size_t>(lucky)] - 1e-6);
  }
}

TEST_CASE("items without observations keep the prior strength") {
  std::vector<PreferenceRecord> records{{0, 1, Outcome::IWins}, {0, 1, Outcome::IWins}};
  BtFit fit = fit_bt(records, 4);
  CHECK(fit.theta[2] == 1.0);
  CHECK(fit.theta[3] == 1.0);
  CHECK(fit.theta[0] > 1.0);
  CHECK(fit.theta[0] + fit.theta[1] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("degenerate fit on zero records") {
  BtFit fit = fit_bt({}, 5);
  CHECK(fit.degenerate);
  CHECK(fit.theta == std::vector<double>(5, 1.0));
  CHECK_THROWS_AS(fit_bt({}, 1), std::invalid_argument);
  std::vector<PreferenceRecord> self{{2, 2, Outcome::Tie}};
  CHECK_THROWS_AS(fit_bt(self, 5), std::invalid_argument);
  std::vector<PreferenceRecord> oob{{0, 9, Outcome::Tie}};
  CHECK_THROWS_AS(fit_bt(oob, 5), std::invalid_argument);
}

TEST_CASE("rank_items ordering and tie-breaks") {
  std::vector<double> theta{3.0, 1.0, 2.0};
  CHECK(rank_items(theta) == std::vector<int>{0, 2, 1});
  std::vector<double> uniform{1.0, 1.0, 1.0, 1.0};
  CHECK(rank_items(uniform) == std::vector<int>{0, 1, 2, 3});
  std::vector<double> reversed{1.0, 2.0, 3.0};
  auto forward = rank_items(reversed);
  std::vector<double> flipped{3.0, 2.0, 1.0};
  auto backward = rank_items(flipped);
  CHECK(std::vector<int>(forward.rbegin(), forward.rend()) == backward);
}

TEST_CASE("strength recovery from sampled judgments") {
  // Ground-truth strengths drive a sampled tournament; the fit must put the
  // items back in (nearly) the right order.
  std::vector<double> taus;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 gen(rng::splitmix64(seed));
    const int n = 8;
    std::vector<double> truth;
    for (int i = 0; i < n; ++i) {
      truth.push_back(std::exp(rng::uniform_range(gen, std::log(0.25), std::log(4.0))));
    }
    std::vector<PreferenceRecord> records;
    for (int k = 0; k < 200; ++k) {
      int i = static_cast<int>(rng::uniform_index(gen, n));
      int j = static_cast<int>(rng::uniform_index(gen, n));
      if (i == j) {
        --k;
        continue;
      }
      auto p = pair_probabilities(truth[static_cast<std::size_t>(i)],
                                  truth[static_cast<std::size_t>(j)], 1.0);
      std::size_t draw = rng::categorical(gen, p);
      records.push_back(
          {i, j, draw == 0 ? Outcome::IWins : draw == 1 ? Outcome::JWins : Outcome::Tie});
    }
    BtFit fit = fit_bt(records, n);
    taus.push_back(testing::kendall_tau(fit.theta, truth));
  }
  CHECK(testing::median(taus) >= 0.8);
}

TEST_CASE("judgment log round trip") {
  PreferenceRecord rec = judgment_from_json_text(R"({"i": 3, "j": 1, "outcome": "j"})", "t");
  CHECK(rec.i == 3);
  CHECK(rec.j == 1);
  CHECK(rec.outcome == Outcome::JWins);
  CHECK_THROWS(judgment_from_json_text(R"({"i": 3, "j": 1, "outcome": "draw"})", "t"));
  CHECK_THROWS(judgment_from_json_text(R"({"i": 3})", "t"));
  CHECK_THROWS(judgment_from_json_text("nonsense", "t"));

  auto tmp = std::filesystem::temp_directory_path() / "ewr_judgments_test.jsonl";
  {
    std::ofstream out(tmp);
    out << R"({"i": 0, "j": 1, "outcome": "i"})" << "\n";
    out << "\n";
    out << R"({"i": 1, "j": 2, "outcome": "tie"})" << "\n";
  }
  auto records = load_judgments(tmp);
  REQUIRE(records.size() == 2);
  CHECK(records[0].outcome == Outcome::IWins);
  CHECK(records[1].outcome == Outcome::Tie);
  std::filesystem::remove(tmp);
}
