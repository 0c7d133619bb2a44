#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "maibl/rng.hpp"

namespace maibl {

// Encoded observation. Producers pack whatever state view they expose into
// 64 bits; the memory layer only needs equality and hashing.
using ObsCode = std::uint64_t;

// Global experience time. Starts at 1 and advances once per environment
// step, shared by all options of one agent.
using TimeT = std::int64_t;

struct OptionKey {
  ObsCode obs = 0;
  int action = 0;

  friend bool operator==(const OptionKey&, const OptionKey&) = default;
};

struct MemoryParams {
  double decay = 0.5;
  double noise = 0.25;
  double tau = 0.25 * 1.4142135623730951;  // noise * sqrt(2)
  double default_utility = 0.1;

  // tau falls back to noise*sqrt(2); with zero noise that would collapse the
  // retrieval soft-max, so a small positive floor is used instead.
  static double default_tau(double noise) {
    return noise > 0.0 ? noise * std::sqrt(2.0) : 1e-6;
  }

  static MemoryParams make(double decay, double noise, double default_utility) {
    MemoryParams p;
    p.decay = decay;
    p.noise = noise;
    p.tau = default_tau(noise);
    p.default_utility = default_utility;
    return p;
  }

  void validate() const;
};

// One remembered outcome for an option together with every global time at
// which it was experienced. Timestamps are strictly increasing.
struct Instance {
  double outcome = 0.0;
  std::vector<TimeT> timestamps;
};

// Activation of a single instance at time t:
//   ln( sum_{t' in T} (t - t')^(-d) ) + noise * ln((1 - xi)/xi)
// The caller supplies xi; with noise == 0 the noise term is exactly 0 and
// the draw is ignored.
double activation(const Instance& instance, TimeT t, const MemoryParams& params,
                  double noise_draw);

// Associative store from (observation, action) options to their instances.
// Every option ever touched holds a prepopulated instance
// (default_utility, {0}) that takes part in activation and blending like
// any other. Single-writer: one store belongs to one agent of one run.
class MemoryStore {
 public:
  MemoryStore(int n_actions, const MemoryParams& params);

  // Appends timestamp t to the instance whose outcome compares exactly
  // equal (after canonicalizing -0.0 to 0.0), or creates a new instance.
  // t must exceed every timestamp already stored for this option.
  void record(OptionKey key, double outcome, TimeT t);

  // Soft-max over activations, one entry per instance of the option in
  // storage order (the default instance first). Draws one noise value per
  // instance from rng when noise > 0.
  std::vector<double> retrieval_probabilities(OptionKey key, TimeT t, Rng& rng);

  // Retrieval-probability-weighted mean of the option's outcomes.
  double blended_value(OptionKey key, TimeT t, Rng& rng);

  // Blended value for every action of one observation; the hot path of the
  // decision loop. out.size() must equal n_actions(). Options are evaluated
  // in action order, instances in storage order, one fresh noise draw per
  // instance per query.
  void blend_all(ObsCode obs, TimeT t, Rng& rng, std::span<double> out);

  // Materialized snapshot of the option's instances (touches the option,
  // creating the default instance if absent).
  std::vector<Instance> instances(OptionKey key);

  int n_actions() const { return n_actions_; }
  const MemoryParams& params() const { return params_; }
  std::size_t observation_count() const { return table_.size(); }
  std::size_t total_records() const { return total_records_; }

  // Line-delimited debug dump, one line per instance, deterministic order.
  void dump(std::ostream& os) const;

 private:
  // Instances of one option, stored as parallel record arrays: outcomes_
  // holds one value per instance; each record pairs a timestamp with the
  // instance it belongs to. Records stay in increasing-timestamp order, so
  // per-instance timestamp lists are recovered as ordered subsequences.
  struct OptionMemory {
    std::vector<double> outcomes;
    std::vector<std::uint32_t> rec_ts;
    std::vector<std::uint32_t> rec_inst;
    double min_outcome = 0.0;
    double max_outcome = 0.0;
    std::uint32_t last_ts = 0;

    bool initialized() const { return !outcomes.empty(); }
  };

  struct ObsEntry {
    std::vector<OptionMemory> options;
  };

  OptionMemory& touch(ObsCode obs, int action);
  ObsEntry& touch_obs(ObsCode obs);
  // Fills act_scratch_ with activations for every instance of the option.
  void compute_activations(const OptionMemory& om, TimeT t, Rng& rng);
  double blend_option(OptionMemory& om, TimeT t, Rng& rng);

  struct ObsHash {
    std::size_t operator()(ObsCode o) const { return splitmix64(o); }
  };

  std::unordered_map<ObsCode, ObsEntry, ObsHash> table_;
  MemoryParams params_;
  int n_actions_;
  std::size_t total_records_ = 0;
  std::vector<double> base_scratch_;
  std::vector<double> act_scratch_;
};

}  // namespace maibl
