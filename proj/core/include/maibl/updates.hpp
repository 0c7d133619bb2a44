#pragma once

#include <stdexcept>

#include "maibl/leniency.hpp"
#include "maibl/rng.hpp"

namespace maibl {

struct TDParams {
  double gamma = 0.99;
  double alpha = 0.5;
  double beta = 0.01;

  void validate_greedy() const {
    if (!(gamma >= 0.0 && gamma <= 1.0))
      throw std::invalid_argument("update: gamma must lie in [0,1]");
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("update: alpha must lie in (0,1]");
  }
  void validate_hysteretic() const {
    validate_greedy();
    if (!(beta >= 0.0 && beta < alpha))
      throw std::invalid_argument("update: beta must lie in [0, alpha)");
  }
};

// r + gamma * max_a V(o', a) - V(o, a), with the max term forced to 0 at a
// terminal next state so the default utility cannot leak past episode end.
inline double td_error(double reward, double max_next_value, double current_value,
                       double gamma, bool terminal) {
  const double bootstrap = terminal ? 0.0 : gamma * max_next_value;
  return reward + bootstrap - current_value;
}

inline double greedy_outcome(double current_value, double delta, double alpha) {
  return current_value + alpha * delta;
}

// Two learning rates: full alpha steps on good news, damped beta steps
// otherwise (delta == 0 lands in the beta branch; the value is identical).
inline double hysteretic_outcome(double current_value, double delta, double alpha,
                                 double beta) {
  return delta > 0.0 ? current_value + alpha * delta : current_value + beta * delta;
}

// Draws R ~ U(0,1) (always consuming the draw), applies the update when
// delta > 0 or R exceeds the leniency threshold 1 - e^(-k * T(o,a)), and
// returns the value unchanged otherwise. The caller records the result
// either way, so rejected updates still advance memory.
inline double lenient_outcome(double current_value, double delta, double alpha,
                              TemperatureTable& temperatures, ObsCode obs,
                              int action, Rng& rng) {
  const double r = rng.next_double();
  if (delta > 0.0 || r > temperatures.leniency(obs, action))
    return current_value + alpha * delta;
  return current_value;
}

}  // namespace maibl
