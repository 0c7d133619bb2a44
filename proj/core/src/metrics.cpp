#include "maibl/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace maibl {

RunMetrics summarize_run(std::span<const EpisodeTrace> traces, int optimal_zone,
                         double gamma, double expected_optimal) {
  if (traces.empty()) throw std::invalid_argument("metrics: no episodes");
  if (!(expected_optimal > 0.0))
    throw std::invalid_argument("metrics: expected optimal reward must be positive");
  RunMetrics m;
  m.episodes = static_cast<long>(traces.size());
  double coord_sum = 0.0, eff_sum = 0.0;
  double step_sum = 0.0, mstep_sum = 0.0, dstep_sum = 0.0;
  for (const EpisodeTrace& t : traces) {
    if (!(t.delivered && t.zone == optimal_zone)) continue;
    m.optimal_episodes += 1;
    if (t.carrying_steps <= 0)
      throw std::logic_error("metrics: delivered episode without carrying steps");
    coord_sum += static_cast<double>(t.joint_move_steps) /
                 static_cast<double>(t.carrying_steps);
    eff_sum += efficiency_contribution(gamma, t.steps, t.reward, expected_optimal);
    const double g0 = static_cast<double>(t.grasp_step[0]);
    const double g1 = static_cast<double>(t.grasp_step[1]);
    step_sum += static_cast<double>(t.steps);
    mstep_sum += std::max(g0, g1);
    dstep_sum += std::abs(g0 - g1);
  }
  const double n = static_cast<double>(m.episodes);
  m.pmax = static_cast<double>(m.optimal_episodes) / n;
  m.pcoordinate = coord_sum / n;
  m.efficiency = eff_sum / n;
  if (m.optimal_episodes > 0) {
    const double k = static_cast<double>(m.optimal_episodes);
    m.has_step_metrics = true;
    m.step = step_sum / k;
    m.mstep = mstep_sum / k;
    m.dstep = dstep_sum / k;
  }
  return m;
}

MetricStats stats(std::span<const double> values) {
  MetricStats s;
  s.count = static_cast<long>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  s.stderror = s.stddev / std::sqrt(static_cast<double>(values.size()));
  return s;
}

AggregateSummary aggregate(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw std::invalid_argument("metrics: no runs to aggregate");
  AggregateSummary a;
  a.runs = static_cast<long>(runs.size());
  std::vector<double> pmax, pcoord, eff, step, mstep, dstep;
  for (const RunMetrics& r : runs) {
    pmax.push_back(r.pmax);
    pcoord.push_back(r.pcoordinate);
    eff.push_back(r.efficiency);
    if (r.has_step_metrics) {
      step.push_back(r.step);
      mstep.push_back(r.mstep);
      dstep.push_back(r.dstep);
    } else {
      a.runs_without_optimal += 1;
    }
  }
  a.pmax = stats(pmax);
  a.pcoordinate = stats(pcoord);
  a.efficiency = stats(eff);
  a.step = stats(step);
  a.mstep = stats(mstep);
  a.dstep = stats(dstep);
  return a;
}

}  // namespace maibl
