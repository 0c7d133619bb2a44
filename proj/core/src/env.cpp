#include "maibl/env.hpp"

#include <stdexcept>

namespace maibl {
namespace {

constexpr double kObstaclePenalty = -0.05;
constexpr double kStayPenalty = -0.01;

inline Pos shifted(Pos p, Action a) {
  const Pos d = action_delta(a);
  return {p.x + d.x, p.y + d.y};
}

inline bool at_flank(const GridState& s, int agent) {
  const Pos left{s.item.x - 1, s.item.y};
  const Pos right{s.item.x + 1, s.item.y};
  return s.agents[agent] == left || s.agents[agent] == right;
}

inline bool flanking(const GridState& s) {
  const Pos left{s.item.x - 1, s.item.y};
  const Pos right{s.item.x + 1, s.item.y};
  return (s.agents[0] == left && s.agents[1] == right) ||
         (s.agents[0] == right && s.agents[1] == left);
}

}  // namespace

GridState initial_state(const GridMap& map) {
  GridState s;
  s.agents[0] = map.agent_start(0);
  s.agents[1] = map.agent_start(1);
  s.item = map.item_start();
  if (flanking(s)) {
    s.phase = Phase::carrying;
    s.grasp_step[0] = 0;
    s.grasp_step[1] = 0;
  }
  return s;
}

StepResult step(const GridMap& map, const Scenario& scenario, GridState& state,
                Action a0, Action a1, Rng& reward_rng) {
  if (state.phase == Phase::delivered)
    throw std::logic_error("env: step on a delivered state");
  StepResult result;
  const long step_index = state.step_count + 1;
  const Action actions[2] = {a0, a1};

  if (state.phase == Phase::seeking) {
    Pos final_pos[2];
    for (int i = 0; i < 2; ++i) {
      const Pos cur = state.agents[i];
      final_pos[i] = cur;
      if (actions[i] == Action::stay) {
        result.penalty[i] = kStayPenalty;
        continue;
      }
      // A grasping agent holds its side of the item until the partner
      // arrives at the other side; its movement attempts do nothing.
      if (at_flank(state, i)) continue;
      const Pos want = shifted(cur, actions[i]);
      if (!map.walkable(want)) {
        result.penalty[i] = kObstaclePenalty;
      } else if (want == state.item || want == state.agents[1 - i]) {
        // Blocked by the item or the partner's pre-step cell (covers swaps);
        // the move fails silently.
      } else {
        final_pos[i] = want;
      }
    }
    if (final_pos[0] == final_pos[1]) {
      // Both moves targeted the same cell; neither happens.
      final_pos[0] = state.agents[0];
      final_pos[1] = state.agents[1];
    }
    for (int i = 0; i < 2; ++i) {
      if (!(final_pos[i] == state.agents[i])) {
        state.agents[i] = final_pos[i];
        state.arrival_step[i] = step_index;
      }
    }
    if (flanking(state)) {
      state.phase = Phase::carrying;
      state.grasp_step[0] = state.arrival_step[0];
      state.grasp_step[1] = state.arrival_step[1];
      result.picked_up = true;
    }
  } else {
    // Carrying phase.
    for (int i = 0; i < 2; ++i)
      if (actions[i] == Action::stay) result.penalty[i] = kStayPenalty;
    if (a0 == a1 && a0 != Action::stay) {
      const Pos targets[3] = {shifted(state.agents[0], a0), shifted(state.agents[1], a0),
                              shifted(state.item, a0)};
      bool clear = true;
      for (const Pos& p : targets)
        if (!map.walkable(p)) clear = false;
      if (clear) {
        state.agents[0] = targets[0];
        state.agents[1] = targets[1];
        state.item = targets[2];
        result.joint_move = true;
        const int zone = map.zone_at(state.item);
        if (zone != 0) {
          state.phase = Phase::delivered;
          result.delivered = true;
          result.zone = zone;
          result.team_reward = scenario.sample(zone, reward_rng);
        }
      } else {
        result.miscoordination = true;
      }
    } else {
      result.miscoordination = true;
    }
  }

  state.step_count = step_index;
  return result;
}

ObsCode observe(const GridMap& map, const GridState& state, int agent) {
  const auto idx = [&](Pos p) {
    return static_cast<ObsCode>(p.y) * static_cast<ObsCode>(map.width()) +
           static_cast<ObsCode>(p.x);
  };
  return idx(state.agents[agent]) | (idx(state.agents[1 - agent]) << 16) |
         (idx(state.item) << 32) | (static_cast<ObsCode>(state.phase) << 48);
}

}  // namespace maibl
