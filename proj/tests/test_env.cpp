#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "maibl/env.hpp"

using namespace maibl;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// 3x3 room with the item already flanked by the starts.
const GridMap& tiny_map() {
  static const GridMap map = GridMap::parse("AGB\n...\n111\n");
  return map;
}

}  // namespace

TEST_CASE("default map geometry") {
  const GridMap& map = GridMap::default_map();
  CHECK(map.width() == 16);
  CHECK(map.height() == 16);
  CHECK(map.agent_start(0) == Pos{0, 15});
  CHECK(map.agent_start(1) == Pos{15, 15});
  CHECK(map.item_start() == Pos{8, 12});
  CHECK(map.zone_at({1, 0}) == 1);
  CHECK(map.zone_at({7, 0}) == 1);
  CHECK(map.zone_at({9, 0}) == 2);
  CHECK(map.zone_at({15, 0}) == 2);
  CHECK(map.zone_at({0, 0}) == 0);
  CHECK(map.zone_at({8, 0}) == 0);
  CHECK(map.cell({0, 9}) == Cell::obstacle);
  CHECK(map.cell({5, 9}) == Cell::obstacle);
  CHECK(map.walkable({2, 9}));
  CHECK(map.walkable({3, 9}));
  CHECK(map.walkable({12, 9}));
  CHECK_FALSE(map.walkable({-1, 0}));
  CHECK_FALSE(map.walkable({0, 16}));
}

TEST_CASE("the shipped map file matches the built-in text") {
  const std::string file = slurp(std::string(MAIBL_DATA_DIR) + "/maps/default.map");
  CHECK(file == std::string(GridMap::default_map_text()));
  const GridMap loaded = GridMap::load(std::string(MAIBL_DATA_DIR) + "/maps/default.map");
  CHECK(loaded.width() == 16);
  CHECK(loaded.item_start() == Pos{8, 12});
}

TEST_CASE("map parse errors carry source coordinates") {
  CHECK_THROWS_AS(GridMap::parse(""), MapError);

  try {
    GridMap::parse("A.B\n.G\n111\n");
    FAIL("expected a row-length error");
  } catch (const MapError& e) {
    CHECK(e.line == 2);
  }

  try {
    GridMap::parse("AAB\n.G.\n111\n");
    FAIL("expected a duplicate-start error");
  } catch (const MapError& e) {
    CHECK(e.line == 1);
    CHECK(e.column == 2);
  }

  try {
    GridMap::parse("A.B\n.G.\n1X1\n");
    FAIL("expected an unknown-character error");
  } catch (const MapError& e) {
    CHECK(e.line == 3);
    CHECK(e.column == 2);
  }

  CHECK_THROWS_AS(GridMap::parse("A.B\n...\n111\n"), MapError);  // no item
  CHECK_THROWS_AS(GridMap::parse("..B\n.G.\n111\n"), MapError);  // no A
  CHECK_THROWS_AS(GridMap::parse("A..\n.G.\n111\n"), MapError);  // no B

  try {
    GridMap::parse("#G#\nA.B\n111\n");  // item jammed against obstacles
    FAIL("expected a clearance error");
  } catch (const MapError& e) {
    CHECK(e.line == 1);
    CHECK(e.column == 2);
  }
}

TEST_CASE("windows line endings parse like unix ones") {
  const GridMap map = GridMap::parse("A.B\r\n.G.\r\n111\r\n");
  CHECK(map.width() == 3);
  CHECK(map.height() == 3);
  CHECK(map.item_start() == Pos{1, 1});
}

TEST_CASE("starts flanking the item begin in the carrying phase") {
  GridState s = initial_state(tiny_map());
  CHECK(s.phase == Phase::carrying);
  CHECK(s.grasp_step[0] == 0);
  CHECK(s.grasp_step[1] == 0);

  GridState d = initial_state(GridMap::default_map());
  CHECK(d.phase == Phase::seeking);
  CHECK(d.grasp_step[0] == -1);
}

TEST_CASE("seeking: stay and wall penalties") {
  const GridMap& map = GridMap::default_map();
  const Scenario& sc = Scenario::builtin(1);
  Rng rng(1);
  GridState s = initial_state(map);

  StepResult r = step(map, sc, s, Action::stay, Action::stay, rng);
  CHECK(r.penalty[0] == -0.01);
  CHECK(r.penalty[1] == -0.01);
  CHECK(s.agents[0] == Pos{0, 15});
  CHECK(s.step_count == 1);

  // Agent 0 walks off the west edge; agent 1 moves legally.
  r = step(map, sc, s, Action::left, Action::left, rng);
  CHECK(r.penalty[0] == -0.05);
  CHECK(r.penalty[1] == 0.0);
  CHECK(s.agents[0] == Pos{0, 15});
  CHECK(s.agents[1] == Pos{14, 15});
  CHECK(s.arrival_step[1] == 2);
  CHECK(s.arrival_step[0] == 0);
}

TEST_CASE("seeking: an obstacle blocks with a penalty") {
  const GridMap& map = GridMap::default_map();
  const Scenario& sc = Scenario::builtin(1);
  Rng rng(1);
  GridState s = initial_state(map);
  // March agent 0 from (0,15) to (0,10); the next up faces the wall row.
  for (int i = 0; i < 5; ++i) step(map, sc, s, Action::up, Action::stay, rng);
  CHECK(s.agents[0] == Pos{0, 10});
  StepResult r = step(map, sc, s, Action::up, Action::stay, rng);
  CHECK(r.penalty[0] == -0.05);
  CHECK(s.agents[0] == Pos{0, 10});
}

TEST_CASE("seeking: same-target conflicts, swaps, and blocks are silent") {
  const Scenario& sc = Scenario::builtin(1);
  Rng rng(1);

  // Same target: both fail, no penalties.
  {
    const GridMap map = GridMap::parse("A.B\n.G.\n111\n");
    GridState s = initial_state(map);
    StepResult r = step(map, sc, s, Action::right, Action::left, rng);
    CHECK(s.agents[0] == Pos{0, 0});
    CHECK(s.agents[1] == Pos{2, 0});
    CHECK(r.penalty[0] == 0.0);
    CHECK(r.penalty[1] == 0.0);
    CHECK_FALSE(r.picked_up);
  }

  // Swap attempt: each targets the other's pre-step cell; both fail.
  {
    const GridMap map = GridMap::parse("AB..\n.G..\n11..\n");
    GridState s = initial_state(map);
    StepResult r = step(map, sc, s, Action::right, Action::left, rng);
    CHECK(s.agents[0] == Pos{0, 0});
    CHECK(s.agents[1] == Pos{1, 0});
    CHECK(r.penalty[0] == 0.0);
    CHECK(r.penalty[1] == 0.0);
  }

  // The item's cell cannot be entered while seeking.
  {
    const GridMap map = GridMap::parse(".A..\nBG..\n11..\n");
    GridState s = initial_state(map);
    StepResult r = step(map, sc, s, Action::down, Action::stay, rng);
    CHECK(s.agents[0] == Pos{1, 0});
    CHECK(r.penalty[0] == 0.0);
    CHECK(r.penalty[1] == -0.01);
    CHECK_FALSE(r.picked_up);
  }
}

TEST_CASE("pickup freezes each agent's latest arrival step") {
  const GridMap map = GridMap::parse("A....B\n..G...\n......\n111111\n");
  const Scenario& sc = Scenario::builtin(1);
  Rng rng(1);
  GridState s = initial_state(map);

  // Agent 0 reaches the left grasp cell at step 2 and waits; agent 1
  // arrives on the right at step 3, completing the pickup.
  StepResult r = step(map, sc, s, Action::down, Action::down, rng);
  CHECK_FALSE(r.picked_up);
  r = step(map, sc, s, Action::right, Action::left, rng);
  CHECK_FALSE(r.picked_up);
  CHECK(s.agents[0] == Pos{1, 1});
  CHECK(s.agents[1] == Pos{4, 1});
  r = step(map, sc, s, Action::stay, Action::left, rng);
  CHECK(r.picked_up);
  CHECK(r.penalty[0] == -0.01);  // the wait is still a stay
  CHECK(s.phase == Phase::carrying);
  CHECK(s.grasp_step[0] == 2);
  CHECK(s.grasp_step[1] == 3);
}

TEST_CASE("a grasping agent is held at its side until the pickup completes") {
  const GridMap map = GridMap::parse("A....B\n..G...\n......\n111111\n");
  const Scenario& sc = Scenario::builtin(1);
  Rng rng(1);
  GridState s = initial_state(map);

  step(map, sc, s, Action::down, Action::down, rng);
  StepResult r = step(map, sc, s, Action::right, Action::stay, rng);
  CHECK(s.agents[0] == Pos{1, 1});  // on the left grasp cell, holding

  // Walk-away attempts do nothing and cost nothing while the hold lasts.
  r = step(map, sc, s, Action::left, Action::left, rng);
  CHECK(s.agents[0] == Pos{1, 1});
  CHECK(r.penalty[0] == 0.0);
  CHECK_FALSE(r.picked_up);
  r = step(map, sc, s, Action::down, Action::stay, rng);
  CHECK(s.agents[0] == Pos{1, 1});
  CHECK(r.penalty[0] == 0.0);
  CHECK_FALSE(r.picked_up);

  r = step(map, sc, s, Action::up, Action::left, rng);
  CHECK(r.picked_up);
  CHECK(s.phase == Phase::carrying);
  CHECK(s.grasp_step[0] == 2);  // held since its arrival two steps before
  CHECK(s.grasp_step[1] == 5);
}

TEST_CASE("pickup works with the agents mirrored") {
  const GridMap map = GridMap::parse("B....A\n..G...\n......\n111111\n");
  const Scenario& sc = Scenario::builtin(1);
  Rng rng(1);
  GridState s = initial_state(map);
  step(map, sc, s, Action::down, Action::down, rng);
  step(map, sc, s, Action::left, Action::right, rng);
  StepResult r = step(map, sc, s, Action::left, Action::stay, rng);
  CHECK(r.picked_up);
  CHECK(s.phase == Phase::carrying);
  CHECK(s.agents[0] == Pos{3, 1});
  CHECK(s.agents[1] == Pos{1, 1});
}

TEST_CASE("carrying: identical directions translate the block") {
  const GridMap& map = tiny_map();
  const Scenario& sc = Scenario::builtin(1);
  Rng rng(1);
  GridState s = initial_state(map);

  StepResult r = step(map, sc, s, Action::down, Action::down, rng);
  CHECK(r.joint_move);
  CHECK_FALSE(r.miscoordination);
  CHECK_FALSE(r.delivered);
  CHECK(s.agents[0] == Pos{0, 1});
  CHECK(s.agents[1] == Pos{2, 1});
  CHECK(s.item == Pos{1, 1});

  r = step(map, sc, s, Action::down, Action::down, rng);
  CHECK(r.joint_move);
  CHECK(r.delivered);
  CHECK(r.zone == 1);
  CHECK(r.team_reward == 0.8);
  CHECK(s.phase == Phase::delivered);
  CHECK(s.item == Pos{1, 2});

  CHECK_THROWS_AS(step(map, sc, s, Action::stay, Action::stay, rng), std::logic_error);
}

TEST_CASE("carrying: mismatches, stays, and blocked moves miscoordinate") {
  const GridMap& map = tiny_map();
  const Scenario& sc = Scenario::builtin(1);
  Rng rng(1);

  GridState s = initial_state(map);
  StepResult r = step(map, sc, s, Action::up, Action::down, rng);
  CHECK(r.miscoordination);
  CHECK_FALSE(r.joint_move);
  CHECK(r.penalty[0] == 0.0);
  CHECK(s.item == Pos{1, 0});

  r = step(map, sc, s, Action::stay, Action::down, rng);
  CHECK(r.miscoordination);
  CHECK(r.penalty[0] == -0.01);
  CHECK(r.penalty[1] == 0.0);

  r = step(map, sc, s, Action::stay, Action::stay, rng);
  CHECK(r.miscoordination);
  CHECK(r.penalty[0] == -0.01);
  CHECK(r.penalty[1] == -0.01);

  // Identical but blocked (the block would leave the map): no penalty.
  r = step(map, sc, s, Action::up, Action::up, rng);
  CHECK(r.miscoordination);
  CHECK(r.penalty[0] == 0.0);
  CHECK(s.item == Pos{1, 0});

  // Sideways is blocked too: agent 0 would leave the map.
  r = step(map, sc, s, Action::left, Action::left, rng);
  CHECK(r.miscoordination);
  CHECK(s.item == Pos{1, 0});
}

TEST_CASE("delivery to the second zone draws from its distribution") {
  const GridMap map = GridMap::parse("AGB\n...\n222\n");
  const Scenario& sc = Scenario::builtin(1);  // zone 2 pays 1 w.p. 0.6, else 0.4
  Rng rng(5);
  int high = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    GridState s = initial_state(map);
    step(map, sc, s, Action::down, Action::down, rng);
    StepResult r = step(map, sc, s, Action::down, Action::down, rng);
    REQUIRE(r.delivered);
    REQUIRE(r.zone == 2);
    REQUIRE((r.team_reward == 1.0 || r.team_reward == 0.4));
    high += r.team_reward == 1.0 ? 1 : 0;
  }
  CHECK(std::abs(high / static_cast<double>(n) - 0.6) < 0.03);
}

TEST_CASE("observations pack own, partner, item, and phase") {
  const GridMap& map = GridMap::default_map();
  GridState s = initial_state(map);
  const ObsCode a = 240, b = 255, g = 200;  // y*16+x for the three starts
  CHECK(observe(map, s, 0) == (a | (b << 16) | (g << 32)));
  CHECK(observe(map, s, 1) == (b | (a << 16) | (g << 32)));

  GridState c = initial_state(tiny_map());
  // tiny map: agents (0,0) and (2,0), item (1,0), carrying phase.
  CHECK(observe(tiny_map(), c, 0) ==
        (0ull | (2ull << 16) | (1ull << 32) | (1ull << 48)));
}

TEST_CASE("built-in reward settings validate and expose exact expectations") {
  for (int id = 1; id <= 4; ++id) {
    const Scenario& sc = Scenario::builtin(id);
    CHECK_NOTHROW(sc.validate());
    CHECK(sc.optimal_zone() == 1);
  }
  CHECK(Scenario::builtin(1).expected_optimal() == 0.8);
  CHECK(Scenario::builtin(1).zone(2).expectation() == Rational::make(19, 25));  // 0.76
  CHECK(Scenario::builtin(2).expected_optimal() == 0.8);
  CHECK(Scenario::builtin(2).zone(2).expectation() == Rational::make(377, 500));  // 0.754
  CHECK(Scenario::builtin(3).expected_optimal() == 3.2);
  CHECK(Scenario::builtin(3).zone(2).expectation() == Rational::make(3, 1));
  CHECK(Scenario::builtin(4).expected_optimal() == 3.2);
  CHECK(Scenario::builtin(4).zone(1).expectation() == Rational::make(16, 5));
  CHECK_THROWS_AS(Scenario::builtin(5), std::invalid_argument);
}

TEST_CASE("the shipped scenario files match the built-in texts") {
  for (int id = 1; id <= 4; ++id) {
    const std::string path =
        std::string(MAIBL_DATA_DIR) + "/scenarios/scenario" + std::to_string(id) + ".txt";
    CHECK(slurp(path) == std::string(Scenario::builtin_text(id)));
    const Scenario sc = Scenario::load(path);
    CHECK(sc.optimal_zone() == 1);
  }
}

TEST_CASE("rational parsing is exact") {
  CHECK(Rational::parse("3") == Rational::make(3, 1));
  CHECK(Rational::parse("-0.25") == Rational::make(-1, 4));
  CHECK(Rational::parse("3/40") == Rational::make(3, 40));
  CHECK(Rational::parse("0.6") == Rational::make(3, 5));
  CHECK(Rational::parse("0.06") == Rational::make(3, 50));
  CHECK(Rational::parse("7") == Rational::make(7, 1));
  CHECK(Rational::make(2, -4) == Rational::make(-1, 2));
  CHECK(Rational::parse("0.8").value() == 0.8);
  CHECK_THROWS_AS(Rational::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("1."), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("0.1234567890123456"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::make(1, 0), std::invalid_argument);
}

TEST_CASE("scenario text validation") {
  CHECK_THROWS_AS(Scenario::parse("expected 1\nzone 1 reward 1 prob 1\nzone 2 reward 1 prob 1\n"),
                  std::runtime_error);  // missing optimal
  CHECK_THROWS_AS(Scenario::parse("optimal 1\nzone 1 reward 1 prob 1\nzone 2 reward 1 prob 1\n"),
                  std::runtime_error);  // missing expected
  CHECK_THROWS_AS(
      Scenario::parse("optimal 1\nexpected 1\nzone 1 reward 1 prob 0.5\nzone 2 reward 1 prob 1\n"),
      std::runtime_error);  // probabilities don't sum to 1
  CHECK_THROWS_AS(
      Scenario::parse("optimal 1\nexpected 2\nzone 1 reward 1 prob 1\nzone 2 reward 1 prob 1\n"),
      std::runtime_error);  // stated expectation mismatch
  CHECK_THROWS_AS(
      Scenario::parse("optimal 3\nexpected 1\nzone 1 reward 1 prob 1\nzone 2 reward 1 prob 1\n"),
      std::runtime_error);  // bad zone id
  CHECK_THROWS_AS(
      Scenario::parse("frobnicate\noptimal 1\nexpected 1\nzone 1 reward 1 prob 1\n"),
      std::runtime_error);  // unknown directive
  CHECK_THROWS_AS(
      Scenario::parse("optimal 1 now\nexpected 1\nzone 1 reward 1 prob 1\nzone 2 reward 1 prob 1\n"),
      std::runtime_error);  // trailing token

  // Comments and exact fractions are fine.
  const Scenario sc = Scenario::parse(
      "# exact thirds\noptimal 2\nexpected 5/3\n"
      "zone 1 reward 1 prob 1\n"
      "zone 2 reward 2 prob 2/3\nzone 2 reward 1 prob 1/3\n");
  CHECK(sc.optimal_zone() == 2);
  CHECK(sc.expected_optimal_rational() == Rational::make(5, 3));
}

TEST_CASE("reward sampling follows the listed distribution") {
  const Scenario& sc = Scenario::builtin(2);
  Rng rng(123);
  double sum = 0.0;
  int sevens = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double r = sc.sample(2, rng);
    REQUIRE((r == 7.0 || r == 0.06));
    sevens += r == 7.0 ? 1 : 0;
    sum += r;
  }
  CHECK(std::abs(sevens / static_cast<double>(n) - 0.1) < 0.005);
  CHECK(std::abs(sum / n - 0.754) < 0.02);

  // Deterministic given the stream.
  Rng r1(9), r2(9);
  for (int i = 0; i < 100; ++i) REQUIRE(sc.sample(1, r1) == sc.sample(1, r2));
}
