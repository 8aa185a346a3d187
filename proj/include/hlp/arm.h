#ifndef HLP_ARM_H_
#define HLP_ARM_H_

#include <span>
#include <vector>

#include "hlp/geometry.h"
#include "hlp/scene.h"

namespace hlp {

class KernelModel;

// theta_sh: angle from the neck-shoulder link to the upper arm, positive
// towards the back of the table. theta_el: counter-clockwise turn from the
// upper arm to the forearm.
struct ArmConfig {
  double theta_sh = 0.0;
  double theta_el = 0.0;

  friend bool operator==(const ArmConfig&, const ArmConfig&) = default;
};

inline constexpr double kShoulderMin = -1.5707963267948966;
inline constexpr double kShoulderMax = 1.5707963267948966;
inline constexpr double kElbowMin = 0.0;
inline constexpr double kElbowMax = 3.141592653589793;

bool within_limits(const ArmConfig& c);
ArmConfig clamp_to_limits(const ArmConfig& c);

// Link lengths and body placement, in meters.
struct ArmParams {
  double neck_shoulder = 0.18;
  double upper_arm = 0.30;
  double forearm = 0.28;
  // Distance of the neck behind the table's front edge.
  double body_offset = 0.15;
};

// Planar right arm. The neck-shoulder link is fixed along +x (parallel to the
// table edge).
struct ArmModel {
  Point2 neck;
  double neck_shoulder = 0.18;
  double upper_arm = 0.30;
  double forearm = 0.28;

  Point2 shoulder() const { return neck + Point2{neck_shoulder, 0.0}; }
  double reach() const { return upper_arm + forearm; }
};

// Neck placed at the start's projection on the front edge, body_offset behind
// it.
ArmModel arm_model_for(const Scene& scene, const ArmParams& params = {});

struct ArmPose {
  Point2 shoulder;
  Point2 elbow;
  Point2 hand;

  LineSeg upper_arm_link() const { return {shoulder, elbow}; }
  LineSeg forearm_link() const { return {elbow, hand}; }
};

// Throws kJointLimit when the configuration is outside the limits.
ArmPose forward_kinematics(const ArmModel& model, const ArmConfig& config);

// Closed-form two-link solution with the elbow on the outer (clockwise) side,
// clamped to the joint limits. Unreachable targets are projected onto the
// reachable annulus first.
ArmConfig inverse_kinematics(const ArmModel& model, Point2 hand);

// Configuration angles read back from tracked joint positions.
ArmConfig config_from_joints(Point2 shoulder, Point2 elbow, Point2 hand);

struct ClampCounter {
  int predictions = 0;
  int clamped = 0;
};

// Regressed configuration, clamped to the joint limits.
ArmConfig estimate_configuration(const KernelModel& regressor,
                                 std::span<const double> arm_features,
                                 ClampCounter* counter = nullptr);

// Sampled overlap between occupied space and the convex hull swept by a link
// moving from `from` to `to`. Lines are perpendicular to the axis closest to
// the link midpoint's motion.
double link_collision(const LineSeg& from, const LineSeg& to,
                      std::span<const Rect> occupied,
                      int n_lines = kDefaultSamplingLines);

// Configurations along the keypoints: initial for keypoint 0, then one
// regression per subsequent keypoint.
std::vector<ArmConfig> estimate_arm_trace(const ArmModel& model,
                                          const KernelModel& regressor,
                                          std::span<const Point2> keypoints,
                                          const ArmConfig& initial,
                                          ClampCounter* counter = nullptr);

// Sum of upper-arm and forearm link collisions between consecutive
// configurations.
double trace_collision(const ArmModel& model, std::span<const ArmConfig> trace,
                       std::span<const Rect> occupied,
                       int n_lines = kDefaultSamplingLines);

// Expected path collision. The initial configuration defaults to the inverse
// kinematics solution at the first keypoint.
double path_collision(const ArmModel& model, const KernelModel& regressor,
                      std::span<const Point2> keypoints,
                      std::span<const Rect> occupied,
                      int n_lines = kDefaultSamplingLines);
double path_collision(const ArmModel& model, const KernelModel& regressor,
                      std::span<const Point2> keypoints,
                      std::span<const Rect> occupied, int n_lines,
                      const ArmConfig& initial);

}  // namespace hlp

#endif  // HLP_ARM_H_
