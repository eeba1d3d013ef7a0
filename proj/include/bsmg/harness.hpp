#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsmg/learners.hpp"

namespace bsmg {

// Per-agent deviations from the experiment-wide learner settings.
struct AgentOverrides {
  std::optional<int> episodes;
  std::optional<int> max_episode_len;
  std::optional<double> alpha;
  std::optional<std::string> alpha_schedule;
  std::optional<double> gamma;
  std::optional<double> epsilon_start;
  std::optional<double> epsilon_end;
  std::optional<int> record_every;
  std::vector<std::string> start_override;
};

struct ExperimentConfig {
  std::string instance;
  std::vector<AgentKind> agents;
  int trials = 1;
  std::uint64_t base_seed = 0;
  int episodes = 100;
  int max_episode_len = 10;
  double alpha = 0.06;
  std::string alpha_schedule = "constant";
  double gamma = -1.0;  // negative means: use the instance discount
  double epsilon_start = 0.1;
  double epsilon_end = 0.05;
  int record_every = 1;
  std::map<std::string, AgentOverrides> overrides;
};

ExperimentConfig load_experiment_config(const std::string& path);

struct RunRecord {
  int trial = 0;
  int episode = 0;
  std::string state;
  std::string agent;
  double v_defender = 0.0;
  // Pinned to zero by run_experiment so emitted CSVs are byte-reproducible;
  // measured per-trial timing lives in AgentSummary.
  double wall_time_s = 0.0;
};

struct AgentSummary {
  std::string agent;
  std::vector<double> mean_final;  // per state, across trials
  std::vector<double> std_final;
  double wall_mean = 0.0;
  double wall_std = 0.0;
};

struct ExperimentResult {
  std::vector<std::string> states;
  std::vector<RunRecord> records;  // sorted by agent, trial, episode, state
  std::vector<AgentSummary> summary;
};

// Runs every agent x trial cell on a fresh environment. Trial t uses learner
// seed base_seed + t; environment streams are derived from (agent, trial)
// only, so results do not depend on jobs. Configuration problems throw
// before any cell runs.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs = 1);

// records.csv with header trial,episode,state,agent,v_defender,wall_time_s.
// Fields are quoted CSV-style when they contain commas or quotes.
void emit_csv(const std::vector<RunRecord>& records, const std::string& path);

// One self-contained SVG per state: per-agent mean with a +-1 std band.
void emit_plots(const ExperimentResult& result, const std::string& dir);

std::string summary_text(const ExperimentResult& result);

}  // namespace bsmg
