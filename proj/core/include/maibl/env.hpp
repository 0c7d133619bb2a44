#pragma once

#include <cstdint>

#include "maibl/grid.hpp"
#include "maibl/memory.hpp"
#include "maibl/scenario.hpp"

namespace maibl {

enum class Phase : int { seeking = 0, carrying = 1, delivered = 2 };

struct GridState {
  Pos agents[2];
  Pos item;
  Phase phase = Phase::seeking;
  long step_count = 0;
  // Step at which each agent last moved into its current cell (0 = start
  // position). Frozen into grasp_step when pickup completes.
  long arrival_step[2] = {0, 0};
  long grasp_step[2] = {-1, -1};
};

struct StepResult {
  double penalty[2] = {0.0, 0.0};
  double team_reward = 0.0;
  bool joint_move = false;
  // A carrying-phase step in which the block did not translate (mismatched
  // directions, a stay, or a blocked identical move).
  bool miscoordination = false;
  bool picked_up = false;
  bool delivered = false;
  int zone = 0;
};

// Initial state for a map: agents and item on their start cells. The rare
// case of start positions already flanking the item begins in the carrying
// phase with grasp steps 0.
GridState initial_state(const GridMap& map);

// Advances the state by one joint action.
//
// Seeking: moves resolve simultaneously. A move into a wall or obstacle
// fails with penalty -0.05; an explicit stay costs -0.01; moves into the
// item's cell or the partner's pre-step cell fail without penalty (this
// covers swaps); two moves targeting the same cell both fail. If the agents
// end up flanking the item left/right, the phase switches to carrying and
// each agent's grasp step records when it last arrived at its grasp cell.
//
// Carrying: identical movement directions translate the agent-item-agent
// block if the three target cells are walkable (a joint move); anything
// else is a miscoordination and nothing moves. Each agent choosing stay
// pays -0.01; failed directional moves carry no penalty.
//
// Delivery: a joint move that puts the item on a dropzone cell ends the
// episode; the team reward is one draw from that zone's distribution and
// goes to both agents on top of their penalties.
StepResult step(const GridMap& map, const Scenario& scenario, GridState& state,
                Action a0, Action a1, Rng& reward_rng);

// Packed (own, partner, item, phase) observation; the partner's action is
// never part of it.
ObsCode observe(const GridMap& map, const GridState& state, int agent);

// One environment instance confined to a single run; the reward stream
// persists across episodes so a run is one deterministic function of its
// seed.
class CmotpEnv {
 public:
  CmotpEnv(const GridMap& map, const Scenario& scenario, std::uint64_t reward_seed)
      : map_(&map), scenario_(&scenario), rng_(reward_seed), state_(initial_state(map)) {}

  void reset() { state_ = initial_state(*map_); }
  StepResult step(Action a0, Action a1) {
    return maibl::step(*map_, *scenario_, state_, a0, a1, rng_);
  }
  ObsCode observe(int agent) const { return maibl::observe(*map_, state_, agent); }
  bool done() const { return state_.phase == Phase::delivered; }

  const GridState& state() const { return state_; }
  const GridMap& map() const { return *map_; }
  const Scenario& scenario() const { return *scenario_; }

 private:
  const GridMap* map_;
  const Scenario* scenario_;
  Rng rng_;
  GridState state_;
};

}  // namespace maibl
