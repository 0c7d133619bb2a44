#include "maibl/tabular.hpp"

namespace maibl {

TabularAgent::TabularAgent(TabularVariant variant, const TabularConfig& config,
                           std::uint64_t seed)
    : variant_(variant),
      td_(config.td),
      exploration_(ExplorationSchedule::make(config.exploration.epsilon0,
                                             config.exploration.eta,
                                             config.exploration.temperature)),
      table_(kNumActions),
      temperatures_(kNumActions, config.leniency),
      rng_(seed) {
  if (variant == TabularVariant::hysteretic_q)
    td_.validate_hysteretic();
  else
    td_.validate_greedy();
}

Action TabularAgent::select_action(ObsCode obs) {
  table_.values(obs, values_);
  return static_cast<Action>(maibl::select_action(values_, exploration_, rng_));
}

void TabularAgent::learn(ObsCode obs, Action action, double reward, ObsCode next_obs,
                         bool terminal) {
  const int a = static_cast<int>(action);
  switch (variant_) {
    case TabularVariant::q:
      q_update(table_, obs, a, reward, next_obs, terminal, td_.alpha, td_.gamma);
      break;
    case TabularVariant::hysteretic_q:
      hysteretic_q_update(table_, obs, a, reward, next_obs, terminal, td_.alpha,
                          td_.beta, td_.gamma);
      break;
    case TabularVariant::lenient_q:
      lenient_q_update(table_, temperatures_, obs, a, reward, next_obs, terminal,
                       td_.alpha, td_.gamma, rng_);
      break;
  }
}

}  // namespace maibl
