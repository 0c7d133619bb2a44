#include "maibl/scenario.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace maibl {
namespace {

constexpr std::string_view kScenario1 =
    "# Reward setting 1: zone 1 pays a certain 0.8; zone 2 mixes 1 and 0.4.\n"
    "optimal 1\n"
    "expected 0.8\n"
    "zone 1 reward 0.8 prob 1\n"
    "zone 2 reward 1 prob 0.6\n"
    "zone 2 reward 0.4 prob 0.4\n";

constexpr std::string_view kScenario2 =
    "# Reward setting 2: zone 2 pays 7 rarely, almost nothing otherwise.\n"
    "optimal 1\n"
    "expected 0.8\n"
    "zone 1 reward 0.8 prob 1\n"
    "zone 2 reward 7 prob 0.1\n"
    "zone 2 reward 0.06 prob 0.9\n";

constexpr std::string_view kScenario3 =
    "# Reward setting 3: the optimal zone is the stochastic one.\n"
    "optimal 1\n"
    "expected 3.2\n"
    "zone 1 reward 4 prob 0.8\n"
    "zone 1 reward 0 prob 0.2\n"
    "zone 2 reward 3 prob 1\n";

constexpr std::string_view kScenario4 =
    "# Reward setting 4: the optimal zone pays 32 one delivery in ten.\n"
    "optimal 1\n"
    "expected 3.2\n"
    "zone 1 reward 32 prob 0.1\n"
    "zone 1 reward 0 prob 0.9\n"
    "zone 2 reward 3 prob 1\n";

long long parse_ll(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("rational: bad integer '" + std::string(s) + "'");
  return v;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("rational: empty");
  if (const std::size_t slash = text.find('/'); slash != std::string_view::npos) {
    return make(parse_ll(text.substr(0, slash)), parse_ll(text.substr(slash + 1)));
  }
  const std::size_t dot = text.find('.');
  if (dot == std::string_view::npos) return make(parse_ll(text), 1);
  const bool negative = text.starts_with("-");
  std::string_view whole = text.substr(0, dot);
  if (negative) whole.remove_prefix(1);
  const std::string_view frac = text.substr(dot + 1);
  if (frac.empty()) throw std::invalid_argument("rational: trailing dot in '" + std::string(text) + "'");
  if (frac.size() > 15) throw std::invalid_argument("rational: too many decimals in '" + std::string(text) + "'");
  long long den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const long long w = whole.empty() ? 0 : parse_ll(whole);
  long long num = w * den + parse_ll(frac);
  if (negative) num = -num;
  return make(num, den);
}

void Scenario::validate() const {
  for (int z = 1; z <= 2; ++z) {
    const ZoneDistribution& dist = zones_[static_cast<std::size_t>(z - 1)];
    if (dist.outcomes.empty())
      throw std::runtime_error("scenario: zone " + std::to_string(z) + " has no outcomes");
    Rational sum{0, 1};
    for (const RewardOutcome& o : dist.outcomes) {
      if (o.probability.num <= 0 || o.probability.num > o.probability.den)
        throw std::runtime_error("scenario: probabilities must lie in (0,1]");
      sum = sum + o.probability;
    }
    if (!(sum == Rational{1, 1}))
      throw std::runtime_error("scenario: zone " + std::to_string(z) +
                               " probabilities do not sum to 1");
  }
  if (!(zone(optimal_zone_).expectation() == expected_optimal_))
    throw std::runtime_error(
        "scenario: stated expected reward does not match the optimal zone's distribution");
}

double Scenario::sample(int zone_id, Rng& rng) const {
  const ZoneDistribution& dist = zone(zone_id);
  const double u = rng.next_double();
  Rational acc{0, 1};
  for (const RewardOutcome& o : dist.outcomes) {
    acc = acc + o.probability;
    if (u < acc.value()) return o.reward.value();
  }
  return dist.outcomes.back().reward.value();
}

Scenario Scenario::parse(std::string_view text) {
  Scenario s;
  bool have_optimal = false, have_expected = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    const auto fail = [&](const std::string& msg) {
      throw std::runtime_error("scenario: line " + std::to_string(line_no) + ": " + msg);
    };
    if (key == "optimal") {
      std::string v;
      if (!(ls >> v)) fail("expected a zone id after 'optimal'");
      const long long z = parse_ll(v);
      if (z < 1 || z > 2) fail("optimal zone must be 1 or 2");
      s.optimal_zone_ = static_cast<int>(z);
      have_optimal = true;
    } else if (key == "expected") {
      std::string v;
      if (!(ls >> v)) fail("expected a value after 'expected'");
      s.expected_optimal_ = Rational::parse(v);
      have_expected = true;
    } else if (key == "zone") {
      std::string zid, kw1, reward, kw2, prob;
      if (!(ls >> zid >> kw1 >> reward >> kw2 >> prob) || kw1 != "reward" || kw2 != "prob")
        fail("expected 'zone <id> reward <value> prob <value>'");
      const long long z = parse_ll(zid);
      if (z < 1 || z > 2) fail("zone id must be 1 or 2");
      s.zones_[static_cast<std::size_t>(z - 1)].outcomes.push_back(
          {Rational::parse(reward), Rational::parse(prob)});
    } else {
      fail("unknown directive '" + key + "'");
    }
    std::string extra;
    if (ls >> extra) fail("unexpected trailing token '" + extra + "'");
  }
  if (!have_optimal) throw std::runtime_error("scenario: missing 'optimal' line");
  if (!have_expected) throw std::runtime_error("scenario: missing 'expected' line");
  s.validate();
  return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string_view Scenario::builtin_text(int id) {
  switch (id) {
    case 1: return kScenario1;
    case 2: return kScenario2;
    case 3: return kScenario3;
    case 4: return kScenario4;
    default: throw std::invalid_argument("scenario: id must be 1..4");
  }
}

const Scenario& Scenario::builtin(int id) {
  static const Scenario s1 = parse(kScenario1);
  static const Scenario s2 = parse(kScenario2);
  static const Scenario s3 = parse(kScenario3);
  static const Scenario s4 = parse(kScenario4);
  switch (id) {
    case 1: return s1;
    case 2: return s2;
    case 3: return s3;
    case 4: return s4;
    default: throw std::invalid_argument("scenario: id must be 1..4");
  }
}

}  // namespace maibl
