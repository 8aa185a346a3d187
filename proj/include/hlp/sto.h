#ifndef HLP_STO_H_
#define HLP_STO_H_

#include <cstdint>
#include <vector>

#include "hlp/geometry.h"
#include "hlp/planner.h"
#include "hlp/sim.h"

namespace hlp {

using ControlSequence = std::vector<Point2>;

struct STOConfig {
  int n_iterations = 200;
  int n_samples = 8;
  double noise_sigma = 0.01;
  int horizon = 60;  // sequences shorter than this are padded with zero steps
  double u_max = 0.02;
  double pre_grasp_margin = 0.02;  // pre-grasp radius = target half-width + margin
  std::uint64_t seed = 1;
  CostWeights weights;
  SimParams sim;

  double pre_grasp_radius(const Scene& scene) const;
  RolloutOptions rollout_options(const Scene& scene) const;
};

// Steps of length u_max along from -> to; the last one carries the remainder.
ControlSequence straight_line(Point2 from, Point2 to, double u_max);

ControlSequence straight_line_init(const WorldState& state, const STOConfig& cfg);

// Polyline through the plan keypoints with a push macro at each object
// keypoint: approach from the side opposite the move, push the object onto
// its predicted place (x then y), retract to the keypoint.
ControlSequence hlp_init(const Plan& plan, const WorldState& state, const STOConfig& cfg);

// Waypoints that hlp_init connects with straight lines.
std::vector<Point2> hlp_waypoints(const Plan& plan, const WorldState& state);

struct OptimizeResult {
  ControlSequence controls;
  RolloutResult result;
  int iterations = 0;
  std::vector<double> incumbent_costs;  // one entry per iteration, and the initial
  double opt_s = 0.0;
};

OptimizeResult optimize(const WorldState& state, const ControlSequence& init,
                        const STOConfig& cfg);

}  // namespace hlp

#endif  // HLP_STO_H_
