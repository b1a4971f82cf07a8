#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ewreward/judges.hpp"
#include "ewreward/ranking.hpp"
#include "ewreward/rewards.hpp"

using namespace ewreward;

namespace {

EmotionSet words(std::initializer_list<const char*> items) {
  EmotionSet out;
  for (const char* item : items) out.insert(EmotionWord(item));
  return out;
}

// Runs an in-process judge endpoint on an ephemeral port.
class MockJudgeServer {
 public:
  explicit MockJudgeServer(httplib::Server::Handler handler) {
    server_.Post("/", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockJudgeServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("lexicon extraction matches whole words only") {
  EmotionSet vocab = words({"happy", "anxious", "sad"});
  CHECK(lexicon_extract("she seems happy and a bit anxious", vocab) ==
        words({"happy", "anxious"}));
  CHECK(lexicon_extract("no emotional content here", vocab).empty());
  CHECK(lexicon_extract("unhappy but coping", vocab).empty());
  CHECK(lexicon_extract("HAPPY, very Happy!", vocab) == words({"happy"}));
  CHECK(lexicon_extract("", vocab).empty());
}

TEST_CASE("extractor vocabulary is drawn from the wheel configuration") {
  WheelSpec wheel("mini", {{"happy", "joy"}}, {"joy"});
  LexiconMaps maps;
  maps.synonyms["glad"] = "happy";
  EwConfig cfg({GroupingPipeline(maps, wheel)});
  LexiconExtractor extractor = LexiconExtractor::from_config(cfg);
  CHECK(extractor.vocabulary().contains(EmotionWord("glad")));
  CHECK(extractor.vocabulary().contains(EmotionWord("joy")));
  CHECK(extractor.extract("feeling glad today") == words({"glad"}));
}

TEST_CASE("scripted judge follows hidden quality") {
  ScriptedJudge judge({{"good", 2.0}, {"bad", 1.0}});
  CHECK(judge.compare("ctx", "good", "bad") == Preference::A);
  CHECK(judge.compare("ctx", "bad", "good") == Preference::B);
  CHECK(judge.compare("ctx", "good", "good") == Preference::Tie);
  CHECK(judge.compare("ctx", "unknown", "also-unknown") == Preference::Tie);
  CHECK_THROWS_AS(ScriptedJudge({}, 0, 0.5), std::invalid_argument);
}

TEST_CASE("scripted judge noise is deterministic and antisymmetric") {
  ScriptedJudge judge({{"a", 2.0}, {"b", 1.0}, {"c", 3.0}}, 1234, 0.3);
  for (const auto& [x, y] : std::vector<std::pair<std::string, std::string>>{
           {"a", "b"}, {"b", "c"}, {"a", "c"}}) {
    Preference forward = judge.compare("ctx", x, y);
    Preference backward = judge.compare("ctx", y, x);
    CHECK(forward == judge.compare("ctx", x, y));  // stable across calls
    CHECK((forward == Preference::A) == (backward == Preference::B));
  }
  // Some pair must actually flip at a 0.3 rate across many distinct pairs.
  int flips = 0;
  for (int k = 0; k < 200; ++k) {
    std::string low = "low" + std::to_string(k);
    ScriptedJudge noisy({{low, 1.0}, {"high", 2.0}}, 99, 0.3);
    if (noisy.compare("", "high", low) == Preference::B) ++flips;
  }
  CHECK(flips > 20);
  CHECK(flips < 120);
}

TEST_CASE("noise-free scripted judgments are recovered exactly by the fit") {
  std::map<std::string, double> quality{
      {"d0", 5.0}, {"d1", 4.0}, {"d2", 3.0}, {"d3", 2.0}, {"d4", 1.0}};
  ScriptedJudge judge(quality, 0, 0.0);
  std::vector<std::string> descriptions{"d0", "d1", "d2", "d3", "d4"};
  std::vector<PreferenceRecord> records;
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      Preference p = judge.compare("", descriptions[static_cast<std::size_t>(i)],
                                   descriptions[static_cast<std::size_t>(j)]);
      records.push_back({i, j,
                         p == Preference::A   ? Outcome::IWins
                         : p == Preference::B ? Outcome::JWins
                                              : Outcome::Tie});
    }
  }
  BtFit fit = fit_bt(records, 5);
  CHECK(rank_items(fit.theta) == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("remote extraction round trip") {
  MockJudgeServer server([](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.at("task") == "extract");
    REQUIRE(body.contains("prompt"));
    if (body.at("text") == "empty") {
      res.set_content(R"({"emotions": []})", "application/json");
    } else {
      res.set_content(R"({"emotions": ["Happy", "sad "]})", "application/json");
    }
  });
  RemoteJudgeClient client(server.endpoint(), 2000);
  CHECK(client.extract("she smiles") == words({"happy", "sad"}));
  CHECK(client.extract("empty").empty());
}

TEST_CASE("remote compare round trip") {
  MockJudgeServer server([](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.at("task") == "compare");
    std::string a = body.at("a");
    std::string b = body.at("b");
    std::string winner = a.size() > b.size() ? "a" : a.size() < b.size() ? "b" : "tie";
    res.set_content(nlohmann::json{{"winner", winner}}.dump(), "application/json");
  });
  RemoteJudgeClient client(server.endpoint(), 2000);
  CHECK(client.compare("ctx", "longer text", "short") == Preference::A);
  CHECK(client.compare("ctx", "short", "longer text") == Preference::B);
  CHECK(client.compare("ctx", "same", "tied") == Preference::Tie);
}

TEST_CASE("malformed responses are distinguished from transport failures") {
  MockJudgeServer server([](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    std::string text = body.value("text", "");
    if (text == "notjson") {
      res.set_content("}{", "application/json");
    } else if (text == "notlist") {
      res.set_content(R"({"emotions": "happy"})", "application/json");
    } else if (text == "mixed") {
      res.set_content(R"({"emotions": ["happy", 7]})", "application/json");
    } else {
      res.status = 500;
      res.set_content("boom", "text/plain");
    }
  });
  RemoteJudgeClient client(server.endpoint(), 2000);
  CHECK_THROWS_AS(client.extract("notjson"), MalformedResponseError);
  CHECK_THROWS_AS(client.extract("notlist"), MalformedResponseError);
  CHECK_THROWS_AS(client.extract("mixed"), MalformedResponseError);
  CHECK_THROWS_AS(client.extract("error"), TransportError);
}

TEST_CASE("unreachable endpoints surface as transport errors") {
  RemoteJudgeClient client("http://127.0.0.1:9", 200);  // discard port, nobody listens
  CHECK_THROWS_AS(client.extract("anything"), TransportError);
  CHECK_THROWS_AS(client.compare("c", "a", "b"), TransportError);
}

TEST_CASE("slow endpoints hit the timeout") {
  MockJudgeServer server([](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(400));
    res.set_content(R"({"emotions": []})", "application/json");
  });
  RemoteJudgeClient client(server.endpoint(), 50);
  CHECK_THROWS_AS(client.extract("anything"), TransportError);
}

TEST_CASE("client construction validates its inputs") {
  CHECK_THROWS_AS(RemoteJudgeClient("", 1000), std::invalid_argument);
  CHECK_THROWS_AS(RemoteJudgeClient("http://x", 0), std::invalid_argument);
}
