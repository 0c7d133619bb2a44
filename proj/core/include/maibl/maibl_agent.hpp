#pragma once

#include <array>

#include "maibl/agent.hpp"
#include "maibl/exploration.hpp"
#include "maibl/leniency.hpp"
#include "maibl/updates.hpp"

namespace maibl {

enum class MaiblVariant { greedy, hysteretic, lenient };

struct MaiblConfig {
  MemoryParams memory;
  ExplorationSchedule exploration;
  TDParams td;
  LeniencyParams leniency;
};

// Memory-based learner: decisions use blended values over remembered
// outcomes, and the recorded outcome of each step is the TD-adjusted
// blended value, shaped by the variant's update rule.
class MaiblAgent final : public Agent {
 public:
  MaiblAgent(MaiblVariant variant, const MaiblConfig& config, std::uint64_t seed);

  void begin_episode() override { exploration_.begin_episode(); }
  Action select_action(ObsCode obs) override;
  void learn(ObsCode obs, Action action, double reward, ObsCode next_obs,
             bool terminal) override;

  MaiblVariant variant() const { return variant_; }
  TimeT time() const { return t_; }
  MemoryStore& store() { return store_; }
  const ExplorationSchedule& exploration() const { return exploration_; }
  TemperatureTable& temperatures() { return temperatures_; }
  Rng& rng() { return rng_; }

 private:
  MaiblVariant variant_;
  TDParams td_;
  ExplorationSchedule exploration_;
  MemoryStore store_;
  TemperatureTable temperatures_;
  Rng rng_;
  TimeT t_ = 1;
  // Blended values from the latest select_action; the update reuses the
  // chosen option's value instead of re-blending with fresh noise.
  std::array<double, kNumActions> values_{};
  std::array<double, kNumActions> next_values_{};
  ObsCode cached_obs_ = 0;
  bool has_cached_ = false;
};

}  // namespace maibl
