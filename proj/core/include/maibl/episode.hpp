#pragma once

#include <vector>

#include "maibl/agent.hpp"
#include "maibl/env.hpp"

namespace maibl {

// Raw per-step event, kept only when full tracing is requested; carries
// enough to recompute an EpisodeTrace from scratch.
struct StepRecord {
  int actions[2] = {0, 0};
  Pos agents[2];
  Pos item;
  int phase = 0;  // after the step
  double penalty[2] = {0.0, 0.0};
  double team_reward = 0.0;
  bool joint_move = false;
  bool miscoordination = false;
  bool picked_up = false;
  bool delivered = false;
  int zone = 0;
};

struct EpisodeTrace {
  int episode = 0;
  bool delivered = false;
  int zone = 0;  // 0 when the step limit was hit
  long steps = 0;
  long grasp_step[2] = {-1, -1};
  long joint_move_steps = 0;  // successful carrying translations
  long carrying_steps = 0;    // steps that started in the carrying phase
  double reward = 0.0;
  std::vector<StepRecord> step_records;
};

// Lock-step episode loop: both agents select from the pre-step
// observations, the joint action is applied, and each agent learns from its
// own (observation, action, reward, next observation) tuple, where reward
// is its penalty plus the shared team reward.
EpisodeTrace run_episode(CmotpEnv& env, Agent& agent0, Agent& agent1, long step_limit,
                         int episode_index, bool record_steps = false);

}  // namespace maibl
