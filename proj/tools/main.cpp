// ewreward CLI: corpus scoring, reward computation, preference ranking and
// the desk-scale training simulator.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "ewreward/cli_commands.hpp"
#include "ewreward/judges.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Emotion-wheel reward and metric engine"};
  app.require_subcommand(1);

  ewreward::ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score a prediction file against gold labels");
  score_cmd->add_option("--pred", score.pred_path, "Prediction JSONL file")->required();
  score_cmd->add_option("--gold", score.gold_path, "Gold JSONL file")->required();
  score_cmd->add_option("--wheels", score.wheels_path, "Wheel JSON file or directory")
      ->required();
  score_cmd->add_option("--lexicon", score.lexicon_path, "Lexicon JSON file");
  score_cmd->add_option("--out", score.out_path, "Report JSON output path")->required();
  score_cmd->add_option("--workers", score.workers, "Worker threads for per-sample scoring");

  ewreward::RewardOptions reward;
  auto* reward_cmd = app.add_subcommand("reward", "Compute per-prediction rewards");
  reward_cmd->add_option("--pred", reward.pred_path, "Prediction JSONL file")->required();
  reward_cmd->add_option("--gold", reward.gold_path, "Gold JSONL file")->required();
  reward_cmd->add_option("--wheels", reward.wheels_path, "Wheel JSON file or directory")
      ->required();
  reward_cmd->add_option("--lexicon", reward.lexicon_path, "Lexicon JSON file");
  reward_cmd->add_option("--config", reward.config_path, "Reward config JSON file");
  reward_cmd->add_option("--out", reward.out_path, "Reward JSONL output path")->required();
  reward_cmd->add_option("--judge-endpoint", reward.judge_endpoint,
                         "Remote judge endpoint (default: $EWR_JUDGE_ENDPOINT)");

  ewreward::RankOptions rank;
  auto* rank_cmd = app.add_subcommand("rank", "Fit strengths from pairwise judgments");
  rank_cmd->add_option("--judgments", rank.judgments_path, "Judgment JSONL file")->required();
  rank_cmd->add_option("--n-items", rank.n_items, "Number of ranked items")->required();
  rank_cmd->add_option("--beta", rank.beta, "Tie mass (default 1.0)");
  rank_cmd->add_option("--out", rank.out_path, "Ranking JSON output path")->required();

  ewreward::SimulateOptions simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the toy training simulator");
  sim_cmd->add_option("--config", simulate.config_path,
                      "Simulation config JSON ({\"task\": .., \"reward\": ..})");
  sim_cmd->add_option("--penalty", simulate.penalty,
                      "Penalty to compare against the unpenalized run")
      ->check(CLI::IsMember({"none", "p1", "p2", "p3", "sweep"}));
  sim_cmd->add_option("--group-size", simulate.group_size, "Rollouts per group (default 4)");
  sim_cmd->add_option("--steps", simulate.steps, "Training steps (default 2000)");
  sim_cmd->add_option("--seed", simulate.seed, "Simulation seed (default 7)");
  sim_cmd->add_option("--out", simulate.out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (score_cmd->parsed()) return ewreward::cmd_score(score, std::cerr);
  if (reward_cmd->parsed()) return ewreward::cmd_reward(reward, std::cerr);
  if (rank_cmd->parsed()) return ewreward::cmd_rank(rank, std::cerr);
  if (sim_cmd->parsed()) return ewreward::cmd_simulate(simulate, std::cerr);
  return EXIT_FAILURE;
}
