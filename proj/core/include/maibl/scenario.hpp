#pragma once

#include <cstdint>
#include <filesystem>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "maibl/rng.hpp"

namespace maibl {

// Exact fraction used for reward values and probabilities so that
// distribution invariants (probabilities sum to 1, stated expectations) are
// checked without floating-point drift.
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational make(long long n, long long d) {
    if (d == 0) throw std::invalid_argument("rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const long long g = std::gcd(n < 0 ? -n : n, d);
    return Rational{g ? n / g : n, g ? d / g : d};
  }

  // Parses "3", "-0.25", or "3/40" exactly.
  static Rational parse(std::string_view text);

  Rational operator+(const Rational& o) const {
    return make(num * o.den + o.num * den, den * o.den);
  }
  Rational operator*(const Rational& o) const { return make(num * o.num, den * o.den); }
  friend bool operator==(const Rational&, const Rational&) = default;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct RewardOutcome {
  Rational reward;
  Rational probability;
};

struct ZoneDistribution {
  std::vector<RewardOutcome> outcomes;

  Rational expectation() const {
    Rational e{0, 1};
    for (const RewardOutcome& o : outcomes) e = e + o.reward * o.probability;
    return e;
  }
};

// One stochastic-reward setting: a reward distribution per dropzone, which
// zone is optimal, and the optimal zone's expected reward R used by the
// efficiency metric.
class Scenario {
 public:
  // The four shipped settings (1..4).
  static const Scenario& builtin(int id);
  static std::string_view builtin_text(int id);
  static Scenario parse(std::string_view text);
  static Scenario load(const std::filesystem::path& path);

  const ZoneDistribution& zone(int zone_id) const {
    check_zone(zone_id);
    return zones_[static_cast<std::size_t>(zone_id - 1)];
  }
  int optimal_zone() const { return optimal_zone_; }
  // Expected reward of the optimal zone.
  double expected_optimal() const { return expected_optimal_.value(); }
  Rational expected_optimal_rational() const { return expected_optimal_; }

  // Inverse-CDF draw over the zone's outcomes in listed order; consumes
  // exactly one uniform.
  double sample(int zone_id, Rng& rng) const;

  // Checks that every zone's probabilities sum to exactly 1 and that the
  // stated optimal expectation matches the optimal zone's distribution.
  void validate() const;

 private:
  static void check_zone(int zone_id) {
    if (zone_id < 1 || zone_id > 2)
      throw std::invalid_argument("scenario: zone id must be 1 or 2");
  }

  ZoneDistribution zones_[2];
  int optimal_zone_ = 1;
  Rational expected_optimal_{0, 1};
};

}  // namespace maibl
