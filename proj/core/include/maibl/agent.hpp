#pragma once

#include "maibl/grid.hpp"
#include "maibl/memory.hpp"

namespace maibl {

// An independent learner: it sees its own observation stream and reward and
// never the partner's chosen action. One agent instance belongs to one run.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual void begin_episode() = 0;
  virtual Action select_action(ObsCode obs) = 0;
  // Called exactly once per environment step, directly after the
  // select_action that produced `action` for `obs`.
  virtual void learn(ObsCode obs, Action action, double reward, ObsCode next_obs,
                     bool terminal) = 0;
};

}  // namespace maibl
