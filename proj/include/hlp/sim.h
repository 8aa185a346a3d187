#ifndef HLP_SIM_H_
#define HLP_SIM_H_

#include <set>
#include <string>
#include <vector>

#include "hlp/geometry.h"
#include "hlp/scene.h"

namespace hlp {

// Quasi-static push world: a point effector moves over the table and shoves
// whatever it penetrates by the minimum translation. The target does not
// yield: a sub-step that would shift it, directly or through a chain of
// pushed objects, is refused and the effector stops for the rest of the step.
struct WorldState {
  Scene scene;
  Point2 effector;
  std::set<std::string> dropped;
};

WorldState initial_state(const Scene& scene);

struct SimParams {
  double substep = 0.005;         // effector advance per contact check, m
  double workspace_margin = 0.05; // effector may leave the table by this much
  int max_resolution_rounds = 64;
};

// Moves the effector by u and resolves contacts. `pushed`, when given,
// receives the total displacement of the objects shoved.
WorldState step(const WorldState& state, Point2 u, const SimParams& params = {},
                double* pushed = nullptr);

// Sum of pairwise footprint overlaps among objects still on the table.
double residual_overlap(const WorldState& state);

struct CostWeights {
  double distance = 1.0;
  double push = 0.5;
  double dropped = 100.0;
};

struct RolloutOptions {
  double pre_grasp_radius = 0.053;
  CostWeights weights;
  SimParams sim;
  bool record_trace = false;
};

struct RolloutResult {
  WorldState final;
  bool success = false;
  double final_distance = 0.0;  // effector to target centre
  double pushed = 0.0;          // total displacement of non-target objects
  double cost = 0.0;
  std::vector<Point2> effector_trace;
};

RolloutResult rollout(const WorldState& state, const std::vector<Point2>& controls,
                      const RolloutOptions& options = {});

}  // namespace hlp

#endif  // HLP_SIM_H_
