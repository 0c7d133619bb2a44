#pragma once

#include <cmath>
#include <span>

#include "maibl/episode.hpp"

namespace maibl {

// Shared by the run summary and the per-episode curves so both produce
// bit-identical values.
inline double efficiency_contribution(double gamma, long steps, double reward,
                                      double expected_optimal) {
  return std::pow(gamma, static_cast<double>(steps)) * reward / expected_optimal;
}

// The six per-run metrics. PMax, PCoordinate, and Efficiency divide by the
// total episode count; Step, MStep, and DStep are means over optimal
// episodes only and are undefined (has_step_metrics == false) for a run
// that never delivered to the optimal zone.
struct RunMetrics {
  double pmax = 0.0;
  double pcoordinate = 0.0;
  double efficiency = 0.0;
  bool has_step_metrics = false;
  double step = 0.0;
  double mstep = 0.0;
  double dstep = 0.0;
  long episodes = 0;
  long optimal_episodes = 0;
};

// expected_optimal is the optimal zone's expected reward (the R in the
// efficiency denominator).
RunMetrics summarize_run(std::span<const EpisodeTrace> traces, int optimal_zone,
                         double gamma, double expected_optimal);

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  double stderror = 0.0;
  long count = 0;
};

MetricStats stats(std::span<const double> values);

struct AggregateSummary {
  MetricStats pmax;
  MetricStats pcoordinate;
  MetricStats efficiency;
  MetricStats step;
  MetricStats mstep;
  MetricStats dstep;
  long runs = 0;
  // Runs with zero optimal episodes, excluded from step/mstep/dstep.
  long runs_without_optimal = 0;
};

AggregateSummary aggregate(std::span<const RunMetrics> runs);

}  // namespace maibl
