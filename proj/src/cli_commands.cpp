#include "ewreward/cli_commands.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ewreward/grposim.hpp"
#include "ewreward/io.hpp"
#include "ewreward/judges.hpp"
#include "ewreward/parsing.hpp"
#include "ewreward/ranking.hpp"

namespace ewreward {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_json_line(const std::string& line, const std::string& origin) {
  json doc = json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw std::runtime_error(origin + ": expected a JSON object per line");
  }
  return doc;
}

template <typename Fn>
void for_each_jsonl_line(const std::string& path, Fn&& fn) {
  std::istringstream in(read_text_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fn(parse_json_line(line, path + ":" + std::to_string(line_no)),
       path + ":" + std::to_string(line_no));
  }
}

}  // namespace

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  std::vector<PredictionRecord> records;
  std::set<std::string> seen;
  for_each_jsonl_line(path, [&](const json& doc, const std::string& origin) {
    PredictionRecord rec;
    if (!doc.contains("id") || !doc["id"].is_string()) {
      throw std::runtime_error(origin + ": prediction needs a string \"id\"");
    }
    rec.id = doc["id"].get<std::string>();
    if (!seen.insert(rec.id).second) {
      throw std::runtime_error(origin + ": duplicate prediction id '" + rec.id + "'");
    }
    bool has_answer = doc.contains("answer");
    rec.has_output = doc.contains("output");
    if (rec.has_output == has_answer) {
      throw std::runtime_error(origin + ": prediction '" + rec.id +
                               "' needs exactly one of \"output\" or \"answer\"");
    }
    if (rec.has_output) {
      if (!doc["output"].is_string()) {
        throw std::runtime_error(origin + ": \"output\" must be a string");
      }
      rec.output = doc["output"].get<std::string>();
    } else {
      if (!doc["answer"].is_array()) {
        throw std::runtime_error(origin + ": \"answer\" must be an array of strings");
      }
      for (const auto& item : doc["answer"]) {
        if (!item.is_string()) {
          throw std::runtime_error(origin + ": \"answer\" must be an array of strings");
        }
        rec.answer.push_back(item.get<std::string>());
      }
    }
    records.push_back(std::move(rec));
  });
  return records;
}

std::vector<GoldRecord> load_gold(const std::string& path) {
  std::vector<GoldRecord> records;
  std::set<std::string> seen;
  for_each_jsonl_line(path, [&](const json& doc, const std::string& origin) {
    GoldRecord rec;
    if (!doc.contains("id") || !doc["id"].is_string()) {
      throw std::runtime_error(origin + ": gold record needs a string \"id\"");
    }
    rec.id = doc["id"].get<std::string>();
    if (!seen.insert(rec.id).second) {
      throw std::runtime_error(origin + ": duplicate gold id '" + rec.id + "'");
    }
    if (!doc.contains("labels") || !doc["labels"].is_array() || doc["labels"].empty()) {
      throw std::runtime_error(origin + ": gold record '" + rec.id +
                               "' needs a non-empty \"labels\" array");
    }
    for (const auto& item : doc["labels"]) {
      if (!item.is_string()) {
        throw std::runtime_error(origin + ": \"labels\" must be an array of strings");
      }
      rec.labels.push_back(item.get<std::string>());
    }
    records.push_back(std::move(rec));
  });
  return records;
}

RewardConfig reward_config_from_json_text(const std::string& text, const std::string& origin) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw std::runtime_error(origin + ": reward config must be a JSON object");
  }
  RewardConfig cfg;
  if (doc.contains("enabled")) {
    if (!doc["enabled"].is_array()) {
      throw std::runtime_error(origin + ": \"enabled\" must be an array of reward names");
    }
    cfg.enabled.clear();
    for (const auto& item : doc["enabled"]) {
      if (!item.is_string()) {
        throw std::runtime_error(origin + ": \"enabled\" must be an array of reward names");
      }
      cfg.enabled.insert(reward_from_string(item.get<std::string>()));
    }
  }
  if (doc.contains("weights")) {
    if (!doc["weights"].is_object()) {
      throw std::runtime_error(origin + ": \"weights\" must be an object");
    }
    for (const auto& [name, value] : doc["weights"].items()) {
      if (!value.is_number()) {
        throw std::runtime_error(origin + ": weight '" + name + "' must be a number");
      }
      cfg.weights[reward_from_string(name)] = value.get<double>();
    }
  }
  if (doc.contains("penalty")) {
    if (!doc["penalty"].is_string()) {
      throw std::runtime_error(origin + ": \"penalty\" must be a string");
    }
    cfg.penalty = penalty_from_string(doc["penalty"].get<std::string>());
  }
  if (doc.contains("require_think")) {
    if (!doc["require_think"].is_boolean()) {
      throw std::runtime_error(origin + ": \"require_think\" must be a boolean");
    }
    cfg.require_think = doc["require_think"].get<bool>();
  }
  cfg.validate();
  return cfg;
}

EwConfig load_ew_config(const std::string& wheels_path, const std::string& lexicon_path) {
  LexiconMaps maps;
  if (!lexicon_path.empty()) {
    maps = load_lexicon(lexicon_path);
  }

  std::vector<std::filesystem::path> wheel_files;
  std::filesystem::path wheels(wheels_path);
  if (std::filesystem::is_directory(wheels)) {
    for (const auto& entry : std::filesystem::directory_iterator(wheels)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        wheel_files.push_back(entry.path());
      }
    }
    std::sort(wheel_files.begin(), wheel_files.end());
  } else {
    wheel_files.push_back(wheels);
  }
  if (wheel_files.empty()) {
    throw std::runtime_error("no wheel files found under " + wheels_path);
  }

  std::vector<GroupingPipeline> pipelines;
  std::set<std::string> names;
  for (const auto& file : wheel_files) {
    WheelSpec wheel = load_wheel(file);
    if (!names.insert(wheel.name()).second) {
      throw std::runtime_error("duplicate wheel name '" + wheel.name() + "'");
    }
    pipelines.emplace_back(maps, std::move(wheel));
  }
  return EwConfig(std::move(pipelines));
}

namespace {

EmotionSet prediction_words(const PredictionRecord& rec, bool require_think) {
  if (rec.has_output) {
    return parse_output(rec.output, require_think).answer_words;
  }
  return EmotionSet::from_raw_tokens(rec.answer);
}

std::map<std::string, EmotionSet> gold_by_id(const std::vector<GoldRecord>& records) {
  std::map<std::string, EmotionSet> out;
  for (const auto& rec : records) {
    EmotionSet labels = EmotionSet::from_raw_tokens(rec.labels);
    if (labels.empty()) {
      throw std::runtime_error("gold record '" + rec.id + "' has no usable labels");
    }
    out.emplace(rec.id, std::move(labels));
  }
  return out;
}

}  // namespace

int cmd_score(const ScoreOptions& options, std::ostream& err) {
  try {
    if (options.workers < 1) {
      throw std::runtime_error("--workers must be at least 1");
    }
    EwConfig ew = load_ew_config(options.wheels_path, options.lexicon_path);
    std::vector<PredictionRecord> preds = load_predictions(options.pred_path);
    std::map<std::string, EmotionSet> gold = gold_by_id(load_gold(options.gold_path));
    if (preds.empty()) {
      throw std::runtime_error("prediction file " + options.pred_path + " is empty");
    }

    struct Sample {
      std::string id;
      EmotionSet pred;
      const EmotionSet* gold = nullptr;
      SampleScore score;
    };
    std::vector<Sample> samples;
    samples.reserve(preds.size());
    for (const auto& rec : preds) {
      auto hit = gold.find(rec.id);
      if (hit == gold.end()) {
        throw std::runtime_error("prediction id '" + rec.id + "' has no gold record");
      }
      samples.push_back({rec.id, prediction_words(rec, false), &hit->second, {}});
    }
    // Aggregation and output both run in id order, so the report does not
    // depend on record order or on how the work was sharded.
    std::sort(samples.begin(), samples.end(),
              [](const Sample& a, const Sample& b) { return a.id < b.id; });

    auto score_range = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        samples[i].score = ew_sample_score(samples[i].pred, *samples[i].gold, ew);
      }
    };
    int workers = std::min<int>(options.workers, static_cast<int>(samples.size()));
    if (workers <= 1) {
      score_range(0, samples.size());
    } else {
      std::vector<std::thread> pool;
      std::size_t chunk = (samples.size() + static_cast<std::size_t>(workers) - 1) /
                          static_cast<std::size_t>(workers);
      for (int w = 0; w < workers; ++w) {
        std::size_t begin = static_cast<std::size_t>(w) * chunk;
        std::size_t end = std::min(begin + chunk, samples.size());
        if (begin >= end) break;
        pool.emplace_back(score_range, begin, end);
      }
      for (auto& t : pool) t.join();
    }

    const std::size_t k = ew.wheel_count();
    std::vector<double> precision(k, 0.0);
    std::vector<double> recall(k, 0.0);
    for (const auto& s : samples) {
      for (std::size_t w = 0; w < k; ++w) {
        precision[w] += s.score.per_wheel_precision[w];
        recall[w] += s.score.per_wheel_recall[w];
      }
    }
    double n = static_cast<double>(samples.size());
    double ew_total = 0.0;
    ordered_json per_wheel = ordered_json::object();
    for (std::size_t w = 0; w < k; ++w) {
      precision[w] /= n;
      recall[w] /= n;
      double f = harmonic_f(precision[w], recall[w]);
      ew_total += f;
      per_wheel[ew.pipelines()[w].wheel().name()] = {
          {"precision", precision[w]}, {"recall", recall[w]}, {"f", f}};
    }
    ew_total /= static_cast<double>(k);

    ordered_json report;
    report["n_samples"] = samples.size();
    report["ew"] = ew_total;
    report["per_wheel"] = per_wheel;
    report["per_sample"] = ordered_json::array();
    for (const auto& s : samples) {
      ordered_json entry;
      entry["id"] = s.id;
      entry["ew"] = s.score.ew;
      entry["per_wheel_f"] = s.score.per_wheel_f;
      report["per_sample"].push_back(entry);
    }
    atomic_write_text_file(options.out_path, report.dump(2) + "\n");
    return 0;
  } catch (const std::exception& ex) {
    err << "score: " << ex.what() << "\n";
    return 1;
  }
}

int cmd_reward(const RewardOptions& options, std::ostream& err) {
  try {
    RewardConfig cfg;
    if (!options.config_path.empty()) {
      cfg = reward_config_from_json_text(read_text_file(options.config_path),
                                         options.config_path);
    }
    if (cfg.enabled.contains(RewardKind::Perception)) {
      throw std::runtime_error(
          "perception is a group-level reward and has no meaning for a flat prediction file");
    }
    EwConfig ew = load_ew_config(options.wheels_path, options.lexicon_path);

    LexiconExtractor fallback = LexiconExtractor::from_config(ew);
    std::unique_ptr<RemoteJudgeClient> remote;
    if (!options.judge_endpoint.empty()) {
      remote = std::make_unique<RemoteJudgeClient>(options.judge_endpoint);
    } else {
      remote = RemoteJudgeClient::from_env();
    }
    JudgeSet judges;
    judges.extractor = remote ? static_cast<const EmotionExtractor*>(remote.get()) : &fallback;

    std::vector<PredictionRecord> preds = load_predictions(options.pred_path);
    std::map<std::string, EmotionSet> gold = gold_by_id(load_gold(options.gold_path));

    std::ostringstream out;
    for (const auto& rec : preds) {
      auto hit = gold.find(rec.id);
      if (hit == gold.end()) {
        throw std::runtime_error("prediction id '" + rec.id + "' has no gold record");
      }
      ParsedOutput parsed;
      if (rec.has_output) {
        parsed = parse_output(rec.output, cfg.require_think);
      } else {
        parsed.well_formed = true;
        parsed.answer_words = EmotionSet::from_raw_tokens(rec.answer);
      }
      RewardReport report = compose_rewards(parsed, hit->second, cfg, ew, judges);

      ordered_json line;
      line["id"] = rec.id;
      line["total"] = report.total;
      line["penalty_factor"] = report.penalty_factor;
      ordered_json values = ordered_json::object();
      for (const auto& [kind, value] : report.values) {
        values[to_string(kind)] = value;
      }
      line["values"] = values;
      out << line.dump() << "\n";
    }
    atomic_write_text_file(options.out_path, out.str());
    return 0;
  } catch (const std::exception& ex) {
    err << "reward: " << ex.what() << "\n";
    return 1;
  }
}

int cmd_rank(const RankOptions& options, std::ostream& err) {
  try {
    std::vector<PreferenceRecord> records = load_judgments(options.judgments_path);
    BtConfig cfg;
    cfg.beta = options.beta;
    BtFit fit = fit_bt(records, options.n_items, cfg);
    if (fit.degenerate) {
      err << "rank: no judgments; strengths fall back to the uniform prior\n";
    }
    std::vector<int> ranking = rank_items(fit.theta);
    std::vector<int> top_half(ranking.begin(),
                              ranking.begin() + static_cast<long>(ranking.size() / 2));

    ordered_json doc;
    doc["theta"] = fit.theta;
    doc["ranking"] = ranking;
    doc["top_half"] = top_half;
    atomic_write_text_file(options.out_path, doc.dump(2) + "\n");
    return 0;
  } catch (const std::exception& ex) {
    err << "rank: " << ex.what() << "\n";
    return 1;
  }
}

namespace {

void apply_sim_config(const std::string& path, TaskOptions& task, SimOptions& sim,
                      RewardConfig& reward) {
  json doc = json::parse(read_text_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw std::runtime_error(path + ": simulation config must be a JSON object");
  }
  if (doc.contains("task")) {
    const json& t = doc["task"];
    if (!t.is_object()) {
      throw std::runtime_error(path + ": \"task\" must be an object");
    }
    auto read_int = [&](const char* key, int& into) {
      if (t.contains(key)) {
        if (!t[key].is_number_integer()) {
          throw std::runtime_error(path + ": task." + key + " must be an integer");
        }
        into = t[key].get<int>();
      }
    };
    auto read_double = [&](const char* key, double& into) {
      if (t.contains(key)) {
        if (!t[key].is_number()) {
          throw std::runtime_error(path + ": task." + key + " must be a number");
        }
        into = t[key].get<double>();
      }
    };
    read_int("vocab_size", task.vocab_size);
    read_int("n_contexts", task.n_contexts);
    read_int("min_gold_size", task.min_gold_size);
    read_int("max_gold_size", task.max_gold_size);
    read_int("max_len", sim.max_len);
    read_double("gold_bias", sim.gold_bias);
    read_double("learning_rate", sim.learning_rate);
    read_double("kl_coefficient", sim.kl_coefficient);
  }
  if (doc.contains("reward")) {
    reward = reward_config_from_json_text(doc["reward"].dump(), path + ":reward");
  }
}

}  // namespace

int cmd_simulate(const SimulateOptions& options, std::ostream& err) {
  try {
    TaskOptions task_options;
    SimOptions sim_options;
    RewardConfig reward_cfg;
    if (!options.config_path.empty()) {
      apply_sim_config(options.config_path, task_options, sim_options, reward_cfg);
    }
    task_options.seed = options.seed;

    std::vector<PenaltyKind> kinds;
    if (options.penalty == "sweep") {
      kinds = {PenaltyKind::None, PenaltyKind::P1, PenaltyKind::P2, PenaltyKind::P3};
    } else {
      PenaltyKind kind = penalty_from_string(options.penalty);
      kinds = {PenaltyKind::None};
      if (kind != PenaltyKind::None) kinds.push_back(kind);
    }

    SyntheticTask task = SyntheticTask::generate(task_options);
    std::filesystem::create_directories(options.out_dir);

    std::vector<TrainingTrace> traces;
    traces.reserve(kinds.size());
    for (PenaltyKind kind : kinds) {
      RewardConfig cfg = reward_cfg;
      cfg.penalty = kind;
      traces.push_back(
          run_training(task, cfg, options.group_size, options.steps, options.seed, sim_options));
      std::filesystem::path trace_path =
          std::filesystem::path(options.out_dir) / ("trace_" + std::string(to_string(kind)) + ".jsonl");
      atomic_write_text_file(trace_path, trace_to_jsonl(traces.back()));
    }

    HackingReport report =
        hacking_report(traces.front(), std::span(traces).subspan(1));
    atomic_write_text_file(std::filesystem::path(options.out_dir) / "hacking_report.json",
                           hacking_report_to_json(report));
    return 0;
  } catch (const std::exception& ex) {
    err << "simulate: " << ex.what() << "\n";
    return 1;
  }
}

}  // namespace ewreward
