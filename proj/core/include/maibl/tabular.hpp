#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "maibl/agent.hpp"
#include "maibl/exploration.hpp"
#include "maibl/leniency.hpp"
#include "maibl/updates.hpp"

namespace maibl {

// Sparse (observation, action) -> Q store. Reads of unseen pairs return 0
// without creating entries.
class QTable {
 public:
  explicit QTable(int n_actions) : n_actions_(n_actions) {
    if (n_actions <= 0) throw std::invalid_argument("qtable: n_actions must be positive");
  }

  double get(ObsCode obs, int action) const {
    check(action);
    const auto it = table_.find(obs);
    return it == table_.end() ? 0.0 : it->second[static_cast<std::size_t>(action)];
  }

  double max_value(ObsCode obs) const {
    const auto it = table_.find(obs);
    if (it == table_.end()) return 0.0;
    double m = it->second[0];
    for (double v : it->second) m = std::max(m, v);
    return m;
  }

  void values(ObsCode obs, std::span<double> out) const {
    const auto it = table_.find(obs);
    for (int a = 0; a < n_actions_; ++a)
      out[static_cast<std::size_t>(a)] =
          it == table_.end() ? 0.0 : it->second[static_cast<std::size_t>(a)];
  }

  // Writable slot; creates the observation's row (zeros) on first write.
  double& slot(ObsCode obs, int action) {
    check(action);
    std::vector<double>& row = table_[obs];
    if (row.empty()) row.assign(static_cast<std::size_t>(n_actions_), 0.0);
    return row[static_cast<std::size_t>(action)];
  }

  int n_actions() const { return n_actions_; }
  std::size_t observation_count() const { return table_.size(); }

 private:
  void check(int action) const {
    if (action < 0 || action >= n_actions_)
      throw std::invalid_argument("qtable: action out of range");
  }

  struct ObsHash {
    std::size_t operator()(ObsCode o) const { return splitmix64(o); }
  };
  std::unordered_map<ObsCode, std::vector<double>, ObsHash> table_;
  int n_actions_;
};

inline double tabular_td_error(const QTable& table, ObsCode obs, int action,
                               double reward, ObsCode next_obs, bool terminal,
                               double gamma) {
  const double bootstrap = terminal ? 0.0 : gamma * table.max_value(next_obs);
  return reward + bootstrap - table.get(obs, action);
}

inline void q_update(QTable& table, ObsCode obs, int action, double reward,
                     ObsCode next_obs, bool terminal, double alpha, double gamma) {
  const double delta =
      tabular_td_error(table, obs, action, reward, next_obs, terminal, gamma);
  table.slot(obs, action) += alpha * delta;
}

inline void hysteretic_q_update(QTable& table, ObsCode obs, int action, double reward,
                                ObsCode next_obs, bool terminal, double alpha,
                                double beta, double gamma) {
  const double delta =
      tabular_td_error(table, obs, action, reward, next_obs, terminal, gamma);
  table.slot(obs, action) += (delta > 0.0 ? alpha : beta) * delta;
}

// Gated update first (using the pre-fold temperature), then the temperature
// fold; the fold multiplier is the table's theta. Returns whether the
// Q-value update was applied.
inline bool lenient_q_update(QTable& table, TemperatureTable& temperatures, ObsCode obs,
                             int action, double reward, ObsCode next_obs, bool terminal,
                             double alpha, double gamma, Rng& rng) {
  const double delta =
      tabular_td_error(table, obs, action, reward, next_obs, terminal, gamma);
  const double x = rng.next_double();
  const bool applied = delta > 0.0 || x > temperatures.leniency(obs, action);
  if (applied) table.slot(obs, action) += alpha * delta;
  temperatures.fold(obs, action, next_obs, terminal);
  return applied;
}

enum class TabularVariant { q, hysteretic_q, lenient_q };

struct TabularConfig {
  ExplorationSchedule exploration;
  TDParams td;
  LeniencyParams leniency;  // theta holds the lenient-Q temperature decay
};

// Baseline independent learner sharing the same decision driver as the
// memory-based agents but backed by a Q-table.
class TabularAgent final : public Agent {
 public:
  TabularAgent(TabularVariant variant, const TabularConfig& config, std::uint64_t seed);

  void begin_episode() override { exploration_.begin_episode(); }
  Action select_action(ObsCode obs) override;
  void learn(ObsCode obs, Action action, double reward, ObsCode next_obs,
             bool terminal) override;

  QTable& table() { return table_; }
  TemperatureTable& temperatures() { return temperatures_; }
  const ExplorationSchedule& exploration() const { return exploration_; }
  Rng& rng() { return rng_; }

 private:
  TabularVariant variant_;
  TDParams td_;
  ExplorationSchedule exploration_;
  QTable table_;
  TemperatureTable temperatures_;
  Rng rng_;
  std::array<double, kNumActions> values_{};
};

}  // namespace maibl
