#include "maibl/maibl_agent.hpp"

#include <algorithm>

namespace maibl {

MaiblAgent::MaiblAgent(MaiblVariant variant, const MaiblConfig& config,
                       std::uint64_t seed)
    : variant_(variant),
      td_(config.td),
      exploration_(ExplorationSchedule::make(config.exploration.epsilon0,
                                             config.exploration.eta,
                                             config.exploration.temperature)),
      store_(kNumActions, config.memory),
      temperatures_(kNumActions, config.leniency),
      rng_(seed) {
  if (variant == MaiblVariant::hysteretic)
    td_.validate_hysteretic();
  else
    td_.validate_greedy();
}

Action MaiblAgent::select_action(ObsCode obs) {
  store_.blend_all(obs, t_, rng_, values_);
  cached_obs_ = obs;
  has_cached_ = true;
  return static_cast<Action>(maibl::select_action(values_, exploration_, rng_));
}

void MaiblAgent::learn(ObsCode obs, Action action, double reward, ObsCode next_obs,
                       bool terminal) {
  if (!has_cached_ || obs != cached_obs_)
    throw std::logic_error("agent: learn without a matching select_action");
  has_cached_ = false;
  const int a = static_cast<int>(action);
  const double current = values_[static_cast<std::size_t>(a)];

  double max_next = 0.0;
  if (!terminal) {
    store_.blend_all(next_obs, t_, rng_, next_values_);
    max_next = *std::max_element(next_values_.begin(), next_values_.end());
  }
  const double delta = td_error(reward, max_next, current, td_.gamma, terminal);

  double outcome = 0.0;
  switch (variant_) {
    case MaiblVariant::greedy:
      outcome = greedy_outcome(current, delta, td_.alpha);
      break;
    case MaiblVariant::hysteretic:
      outcome = hysteretic_outcome(current, delta, td_.alpha, td_.beta);
      break;
    case MaiblVariant::lenient:
      outcome = lenient_outcome(current, delta, td_.alpha, temperatures_, obs, a, rng_);
      break;
  }
  store_.record({obs, a}, outcome, t_);
  if (variant_ == MaiblVariant::lenient)
    temperatures_.fold(obs, a, next_obs, terminal);
  t_ += 1;
}

}  // namespace maibl
