#include "maibl/episode.hpp"

namespace maibl {

EpisodeTrace run_episode(CmotpEnv& env, Agent& agent0, Agent& agent1, long step_limit,
                         int episode_index, bool record_steps) {
  env.reset();
  agent0.begin_episode();
  agent1.begin_episode();

  EpisodeTrace trace;
  trace.episode = episode_index;

  while (!env.done() && trace.steps < step_limit) {
    const bool was_carrying = env.state().phase == Phase::carrying;
    const ObsCode o0 = env.observe(0);
    const ObsCode o1 = env.observe(1);
    const Action a0 = agent0.select_action(o0);
    const Action a1 = agent1.select_action(o1);
    const StepResult result = env.step(a0, a1);

    agent0.learn(o0, a0, result.penalty[0] + result.team_reward, env.observe(0),
                 result.delivered);
    agent1.learn(o1, a1, result.penalty[1] + result.team_reward, env.observe(1),
                 result.delivered);

    trace.steps += 1;
    if (was_carrying) {
      trace.carrying_steps += 1;
      if (result.joint_move) trace.joint_move_steps += 1;
    }
    if (result.delivered) {
      trace.delivered = true;
      trace.zone = result.zone;
      trace.reward = result.team_reward;
    }
    if (record_steps) {
      StepRecord rec;
      rec.actions[0] = static_cast<int>(a0);
      rec.actions[1] = static_cast<int>(a1);
      rec.agents[0] = env.state().agents[0];
      rec.agents[1] = env.state().agents[1];
      rec.item = env.state().item;
      rec.phase = static_cast<int>(env.state().phase);
      rec.penalty[0] = result.penalty[0];
      rec.penalty[1] = result.penalty[1];
      rec.team_reward = result.team_reward;
      rec.joint_move = result.joint_move;
      rec.miscoordination = result.miscoordination;
      rec.picked_up = result.picked_up;
      rec.delivered = result.delivered;
      rec.zone = result.zone;
      trace.step_records.push_back(rec);
    }
  }
  trace.grasp_step[0] = env.state().grasp_step[0];
  trace.grasp_step[1] = env.state().grasp_step[1];
  return trace;
}

}  // namespace maibl
