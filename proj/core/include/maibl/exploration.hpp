#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "maibl/rng.hpp"

namespace maibl {

// Decreasing epsilon-greedy with a Boltzmann exploration branch. epsilon
// decays by eta once at every episode start, so episode n runs with exactly
// epsilon0 * eta^n (recomputed as a power, not accumulated, to keep the
// schedule free of rounding drift).
struct ExplorationSchedule {
  double epsilon0 = 1.0;
  double eta = 0.999;
  double temperature = 0.8;

  double epsilon = 1.0;
  long episode = 0;

  static ExplorationSchedule make(double epsilon0, double eta, double temperature) {
    if (!(epsilon0 >= 0.0 && epsilon0 <= 1.0))
      throw std::invalid_argument("exploration: epsilon0 must lie in [0,1]");
    if (!(eta > 0.0 && eta < 1.0))
      throw std::invalid_argument("exploration: eta must lie in (0,1)");
    if (!(temperature > 0.0))
      throw std::invalid_argument("exploration: temperature must be positive");
    ExplorationSchedule s;
    s.epsilon0 = epsilon0;
    s.eta = eta;
    s.temperature = temperature;
    s.epsilon = epsilon0;
    return s;
  }

  void begin_episode() {
    episode += 1;
    epsilon = epsilon0 * std::pow(eta, static_cast<double>(episode));
  }
};

inline std::vector<double> boltzmann_probabilities(std::span<const double> values,
                                                   double temperature) {
  if (values.empty()) throw std::invalid_argument("exploration: empty value set");
  if (!(temperature > 0.0))
    throw std::invalid_argument("exploration: temperature must be positive");
  double m = values[0];
  for (double v : values) m = std::max(m, v);
  std::vector<double> p(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    p[i] = std::exp((values[i] - m) / temperature);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

// Inverse-CDF draw over an explicit distribution; consumes one uniform.
inline int sample_categorical(std::span<const double> probs, Rng& rng) {
  if (probs.empty()) throw std::invalid_argument("exploration: empty distribution");
  const double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

// Index of the maximum value; exact ties are broken uniformly, and the
// tie-break draw is consumed only when at least two entries tie.
inline int argmax_tiebreak(std::span<const double> values, Rng& rng) {
  if (values.empty()) throw std::invalid_argument("exploration: empty value set");
  double best = values[0];
  int ties = 1;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > best) {
      best = values[i];
      ties = 1;
    } else if (values[i] == best) {
      ++ties;
    }
  }
  if (ties == 1) {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] == best) return static_cast<int>(i);
  }
  std::uint32_t pick = rng.next_below(static_cast<std::uint32_t>(ties));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == best) {
      if (pick == 0) return static_cast<int>(i);
      --pick;
    }
  }
  throw std::logic_error("exploration: unreachable");
}

// One decision: always consumes the epsilon test draw, then either samples
// from the Boltzmann distribution over values (explore) or takes the argmax
// (exploit).
inline int select_action(std::span<const double> values,
                         const ExplorationSchedule& schedule, Rng& rng) {
  const double u = rng.next_double();
  if (u < schedule.epsilon) {
    std::vector<double> p = boltzmann_probabilities(values, schedule.temperature);
    return sample_categorical(p, rng);
  }
  return argmax_tiebreak(values, rng);
}

}  // namespace maibl
