#include "maibl/memory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace maibl {
namespace {

// -0.0 and 0.0 must land in the same instance.
inline double canonical(double x) { return x == 0.0 ? 0.0 : x; }

inline double decay_kernel(double dt, double d) {
  if (d == 0.5) return 1.0 / std::sqrt(dt);
  if (d == 0.0) return 1.0;
  if (d == 1.0) return 1.0 / dt;
  return std::pow(dt, -d);
}

inline double noise_term(double noise, double draw) {
  if (noise == 0.0) return 0.0;
  if (!(draw > 0.0 && draw < 1.0))
    throw std::logic_error("memory: noise draw outside (0,1)");
  return noise * std::log((1.0 - draw) / draw);
}

}  // namespace

void MemoryParams::validate() const {
  if (!(decay >= 0.0) || !std::isfinite(decay))
    throw std::invalid_argument("memory: decay must be finite and >= 0");
  if (!(noise >= 0.0) || !std::isfinite(noise))
    throw std::invalid_argument("memory: noise must be finite and >= 0");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("memory: tau must be finite and > 0");
  if (!std::isfinite(default_utility))
    throw std::invalid_argument("memory: default utility must be finite");
}

double activation(const Instance& instance, TimeT t, const MemoryParams& params,
                  double noise_draw) {
  if (instance.timestamps.empty())
    throw std::logic_error("memory: instance has no timestamps");
  double base = 0.0;
  for (TimeT ts : instance.timestamps) {
    if (ts >= t) throw std::logic_error("memory: activation query not after last timestamp");
    base += decay_kernel(static_cast<double>(t - ts), params.decay);
  }
  return std::log(base) + noise_term(params.noise, noise_draw);
}

MemoryStore::MemoryStore(int n_actions, const MemoryParams& params)
    : params_(params), n_actions_(n_actions) {
  if (n_actions <= 0) throw std::invalid_argument("memory: n_actions must be positive");
  params_.validate();
}

MemoryStore::ObsEntry& MemoryStore::touch_obs(ObsCode obs) {
  ObsEntry& entry = table_[obs];
  if (entry.options.empty()) {
    entry.options.resize(static_cast<std::size_t>(n_actions_));
    for (OptionMemory& om : entry.options) {
      om.outcomes.push_back(params_.default_utility);
      om.rec_ts.push_back(0);
      om.rec_inst.push_back(0);
      om.min_outcome = params_.default_utility;
      om.max_outcome = params_.default_utility;
      om.last_ts = 0;
    }
  }
  return entry;
}

MemoryStore::OptionMemory& MemoryStore::touch(ObsCode obs, int action) {
  if (action < 0 || action >= n_actions_)
    throw std::invalid_argument("memory: action out of range");
  return touch_obs(obs).options[static_cast<std::size_t>(action)];
}

void MemoryStore::record(OptionKey key, double outcome, TimeT t) {
  if (!std::isfinite(outcome)) throw std::logic_error("memory: non-finite outcome");
  if (t <= 0 || t > static_cast<TimeT>(std::numeric_limits<std::uint32_t>::max()))
    throw std::logic_error("memory: timestamp out of range");
  OptionMemory& om = touch(key.obs, key.action);
  if (static_cast<std::uint32_t>(t) <= om.last_ts)
    throw std::logic_error("memory: timestamps must strictly increase per option");
  const double x = canonical(outcome);
  std::uint32_t inst = 0;
  const std::uint32_t n = static_cast<std::uint32_t>(om.outcomes.size());
  while (inst < n && om.outcomes[inst] != x) ++inst;
  if (inst == n) {
    om.outcomes.push_back(x);
    om.min_outcome = std::min(om.min_outcome, x);
    om.max_outcome = std::max(om.max_outcome, x);
  }
  om.rec_ts.push_back(static_cast<std::uint32_t>(t));
  om.rec_inst.push_back(inst);
  om.last_ts = static_cast<std::uint32_t>(t);
  ++total_records_;
}

void MemoryStore::compute_activations(const OptionMemory& om, TimeT t, Rng& rng) {
  const std::size_t n = om.outcomes.size();
  if (t <= 0 || t > static_cast<TimeT>(std::numeric_limits<std::uint32_t>::max()) ||
      static_cast<std::uint32_t>(t) <= om.last_ts)
    throw std::logic_error("memory: activation query not after last timestamp");
  base_scratch_.assign(n, 0.0);
  const double d = params_.decay;
  const double td = static_cast<double>(t);
  for (std::size_t i = 0; i < om.rec_ts.size(); ++i) {
    base_scratch_[om.rec_inst[i]] +=
        decay_kernel(td - static_cast<double>(om.rec_ts[i]), d);
  }
  act_scratch_.resize(n);
  if (params_.noise == 0.0) {
    for (std::size_t j = 0; j < n; ++j) act_scratch_[j] = std::log(base_scratch_[j]);
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      act_scratch_[j] =
          std::log(base_scratch_[j]) + noise_term(params_.noise, rng.next_open());
    }
  }
}

double MemoryStore::blend_option(OptionMemory& om, TimeT t, Rng& rng) {
  compute_activations(om, t, rng);
  const std::size_t n = om.outcomes.size();
  double m = act_scratch_[0];
  for (std::size_t j = 1; j < n; ++j) m = std::max(m, act_scratch_[j]);
  const double inv_tau = 1.0 / params_.tau;
  double wsum = 0.0, vsum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = std::exp((act_scratch_[j] - m) * inv_tau);
    wsum += w;
    vsum += w * om.outcomes[j];
  }
  return std::clamp(vsum / wsum, om.min_outcome, om.max_outcome);
}

std::vector<double> MemoryStore::retrieval_probabilities(OptionKey key, TimeT t,
                                                         Rng& rng) {
  OptionMemory& om = touch(key.obs, key.action);
  compute_activations(om, t, rng);
  const std::size_t n = om.outcomes.size();
  double m = act_scratch_[0];
  for (std::size_t j = 1; j < n; ++j) m = std::max(m, act_scratch_[j]);
  const double inv_tau = 1.0 / params_.tau;
  std::vector<double> p(n);
  double wsum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    p[j] = std::exp((act_scratch_[j] - m) * inv_tau);
    wsum += p[j];
  }
  for (double& v : p) v /= wsum;
  return p;
}

double MemoryStore::blended_value(OptionKey key, TimeT t, Rng& rng) {
  return blend_option(touch(key.obs, key.action), t, rng);
}

void MemoryStore::blend_all(ObsCode obs, TimeT t, Rng& rng, std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(n_actions_))
    throw std::invalid_argument("memory: blend_all output size mismatch");
  ObsEntry& entry = touch_obs(obs);
  for (int a = 0; a < n_actions_; ++a)
    out[static_cast<std::size_t>(a)] =
        blend_option(entry.options[static_cast<std::size_t>(a)], t, rng);
}

std::vector<Instance> MemoryStore::instances(OptionKey key) {
  OptionMemory& om = touch(key.obs, key.action);
  std::vector<Instance> result(om.outcomes.size());
  for (std::size_t j = 0; j < om.outcomes.size(); ++j)
    result[j].outcome = om.outcomes[j];
  for (std::size_t i = 0; i < om.rec_ts.size(); ++i)
    result[om.rec_inst[i]].timestamps.push_back(static_cast<TimeT>(om.rec_ts[i]));
  return result;
}

void MemoryStore::dump(std::ostream& os) const {
  std::vector<ObsCode> keys;
  keys.reserve(table_.size());
  for (const auto& [obs, entry] : table_) keys.push_back(obs);
  std::sort(keys.begin(), keys.end());
  os.precision(17);
  for (ObsCode obs : keys) {
    const ObsEntry& entry = table_.at(obs);
    for (int a = 0; a < n_actions_; ++a) {
      const OptionMemory& om = entry.options[static_cast<std::size_t>(a)];
      for (std::size_t j = 0; j < om.outcomes.size(); ++j) {
        os << "obs=" << obs << " action=" << a << " outcome=" << om.outcomes[j]
           << " ts=";
        bool first = true;
        for (std::size_t i = 0; i < om.rec_ts.size(); ++i) {
          if (om.rec_inst[i] != j) continue;
          if (!first) os << ',';
          os << om.rec_ts[i];
          first = false;
        }
        os << '\n';
      }
    }
  }
}

}  // namespace maibl
