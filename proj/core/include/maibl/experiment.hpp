#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "maibl/agent.hpp"
#include "maibl/metrics.hpp"

namespace maibl {

inline constexpr const char* kModelIds[] = {"greedy-maibl", "hysteretic-maibl",
                                            "lenient-maibl", "q", "hysteretic-q",
                                            "lenient-q"};

struct ExperimentConfig {
  std::string model = "greedy-maibl";
  int scenario = 1;
  int runs = 30;
  int episodes = 1000;
  long step_limit = 5000;
  std::uint64_t seed = 1;
  std::string map_path;  // empty = built-in default map
  std::string output_dir = "maibl-out";

  // memory
  double decay = 0.5;
  double noise = 0.25;
  double default_utility = 0.1;
  double tau = 0.0;  // 0 = derive from noise

  // exploration
  double epsilon0 = 1.0;
  double eta = 0.999;
  double boltzmann_t = 0.8;

  // temporal difference
  double gamma = 0.99;
  double alpha = 0.5;
  double beta = 0.01;  // hysteretic models

  // leniency (lenient models)
  double t_max = 2.0;
  double k = 1.0;
  double theta = 0.995;
  double nu = 0.1;
  double temp_decay = 0.995;  // lenient-q temperature fold multiplier

  int threads = 0;  // 0 = hardware concurrency, capped at `runs`
  bool full_trace = false;

  void validate() const;  // throws std::invalid_argument
};

// Fresh agent for one run, seeded by (master seed, "agent0"/"agent1",
// run index). Exposed so tests can replay a single run exactly as the
// harness does.
std::unique_ptr<Agent> make_agent(const ExperimentConfig& config, int agent_index,
                                  int run_index);
std::uint64_t env_seed(const ExperimentConfig& config, int run_index);

struct RunOutcome {
  int run = 0;
  bool failed = false;
  std::string error;
  RunMetrics metrics;
  std::vector<EpisodeTrace> traces;
};

// One complete run, in memory (no files). Used by the harness workers and
// directly by tests.
RunOutcome execute_run(const ExperimentConfig& config, int run_index);

struct ExperimentResult {
  AggregateSummary summary;
  std::vector<RunOutcome> runs;  // traces dropped after persistence
  int failed_runs = 0;
};

// Executes config.runs independent runs on a worker pool, persists traces
// (JSON lines), per-run and aggregate summaries and per-episode curves
// (CSV) under config.output_dir, and returns the aggregate. Identical
// configs and seeds produce byte-identical files. Failed runs are excluded
// from aggregation with a warning on `log`.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log);

// Parses one traces/run_*.jsonl file back into episode traces.
std::vector<EpisodeTrace> read_trace_file(const std::string& path);

// Serialization used by the harness; exposed for the trace-recompute tool.
std::string trace_to_json(const EpisodeTrace& trace);
EpisodeTrace trace_from_json(const std::string& line);

}  // namespace maibl
