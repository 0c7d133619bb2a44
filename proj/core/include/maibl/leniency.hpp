#pragma once

#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "maibl/memory.hpp"

namespace maibl {

struct LeniencyParams {
  double t_max = 2.0;
  double k = 1.0;
  double theta = 0.995;
  double nu = 0.1;

  void validate() const {
    if (!(t_max >= 0.0)) throw std::invalid_argument("leniency: t_max must be >= 0");
    if (!(k > 0.0)) throw std::invalid_argument("leniency: k must be > 0");
    if (!(theta >= 0.0 && theta <= 1.0))
      throw std::invalid_argument("leniency: theta must lie in [0,1]");
    if (!(nu >= 0.0 && nu <= 1.0))
      throw std::invalid_argument("leniency: nu must lie in [0,1]");
  }
};

// Per-(observation, action) leniency temperatures, initialized to t_max on
// first touch. Temperatures only shrink (theta <= 1, averaging stays below
// the ceiling), so willingness to forgive negative feedback decays with
// visit frequency.
class TemperatureTable {
 public:
  TemperatureTable(int n_actions, const LeniencyParams& params)
      : params_(params), n_actions_(n_actions) {
    if (n_actions <= 0) throw std::invalid_argument("leniency: n_actions must be positive");
    params_.validate();
  }

  double get(ObsCode obs, int action) { return row(obs)[check(action)]; }

  // Mean temperature over all actions of one observation.
  double mean(ObsCode obs) {
    const std::vector<double>& r = row(obs);
    double sum = 0.0;
    for (double v : r) sum += v;
    return sum / static_cast<double>(n_actions_);
  }

  // Probability that a negative update is ignored: 1 - e^(-k * T(o,a)).
  double leniency(ObsCode obs, int action) {
    return 1.0 - std::exp(-params_.k * get(obs, action));
  }

  // T(o,a) <- theta * ((1-nu) * T(o,a) + nu * mean_a' T(o',a')) when the
  // transition continues, theta * T(o,a) when it terminates.
  void fold(ObsCode obs, int action, ObsCode next_obs, bool terminal) {
    if (terminal) {
      row(obs)[check(action)] *= params_.theta;
      return;
    }
    // mean() may create the next observation's row and rehash, so compute it
    // before taking a reference into the table.
    const double bar = mean(next_obs);
    double& t = row(obs)[check(action)];
    t = params_.theta * ((1.0 - params_.nu) * t + params_.nu * bar);
  }

  const LeniencyParams& params() const { return params_; }
  int n_actions() const { return n_actions_; }
  std::size_t observation_count() const { return table_.size(); }

 private:
  int check(int action) const {
    if (action < 0 || action >= n_actions_)
      throw std::invalid_argument("leniency: action out of range");
    return action;
  }

  std::vector<double>& row(ObsCode obs) {
    std::vector<double>& r = table_[obs];
    if (r.empty()) r.assign(static_cast<std::size_t>(n_actions_), params_.t_max);
    return r;
  }

  struct ObsHash {
    std::size_t operator()(ObsCode o) const { return splitmix64(o); }
  };

  std::unordered_map<ObsCode, std::vector<double>, ObsHash> table_;
  LeniencyParams params_;
  int n_actions_;
};

}  // namespace maibl
