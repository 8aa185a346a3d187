#include "hlp/arm.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hlp/error.h"
#include "hlp/features.h"
#include "hlp/learners.h"

namespace hlp {

bool within_limits(const ArmConfig& c) {
  return c.theta_sh >= kShoulderMin && c.theta_sh <= kShoulderMax &&
         c.theta_el >= kElbowMin && c.theta_el <= kElbowMax;
}

ArmConfig clamp_to_limits(const ArmConfig& c) {
  return {std::clamp(c.theta_sh, kShoulderMin, kShoulderMax),
          std::clamp(c.theta_el, kElbowMin, kElbowMax)};
}

ArmModel arm_model_for(const Scene& scene, const ArmParams& params) {
  ArmModel m;
  m.neck = {scene.start.x, -params.body_offset};
  m.neck_shoulder = params.neck_shoulder;
  m.upper_arm = params.upper_arm;
  m.forearm = params.forearm;
  return m;
}

ArmPose forward_kinematics(const ArmModel& model, const ArmConfig& config) {
  if (!within_limits(config)) {
    throw Error(ErrorCode::kJointLimit,
                "configuration (" + std::to_string(config.theta_sh) + ", " +
                    std::to_string(config.theta_el) + ") outside joint limits");
  }
  ArmPose pose;
  pose.shoulder = model.shoulder();
  const double a1 = config.theta_sh;
  const double a2 = config.theta_sh + config.theta_el;
  pose.elbow = pose.shoulder + model.upper_arm * Point2{std::cos(a1), std::sin(a1)};
  pose.hand = pose.elbow + model.forearm * Point2{std::cos(a2), std::sin(a2)};
  return pose;
}

ArmConfig inverse_kinematics(const ArmModel& model, Point2 hand) {
  const double lu = model.upper_arm;
  const double lf = model.forearm;
  const Point2 d = hand - model.shoulder();
  const double r_min = std::abs(lu - lf);
  const double r_max = lu + lf;
  double r = norm(d);
  const double beta = r > 0.0 ? std::atan2(d.y, d.x) : std::numbers::pi / 2;
  r = std::clamp(r, std::max(r_min, 1e-12), r_max);
  // Half-angle form of the triangle (lu, lf, r): exact at full extension,
  // where acos of the law of cosines loses half the digits.
  const double s = 0.5 * (lu + lf + r);
  const double a = std::max(0.0, 0.5 * (lf + r - lu));
  const double b = std::max(0.0, 0.5 * (lu + r - lf));
  const double c = std::max(0.0, 0.5 * (lu + lf - r));
  const double alpha = 2.0 * std::atan2(std::sqrt(a * c), std::sqrt(s * b));
  const double elbow = 2.0 * std::atan2(std::sqrt(s * c), std::sqrt(a * b));
  return clamp_to_limits({wrap_angle(beta - alpha), elbow});
}

ArmConfig config_from_joints(Point2 shoulder, Point2 elbow, Point2 hand) {
  const Point2 u = elbow - shoulder;
  const Point2 f = hand - elbow;
  const double sh = std::atan2(u.y, u.x);
  const double el = wrap_angle(std::atan2(f.y, f.x) - sh);
  return clamp_to_limits({sh, el});
}

ArmConfig estimate_configuration(const KernelModel& regressor,
                                 std::span<const double> arm_features,
                                 ClampCounter* counter) {
  if (regressor.kind() != ModelKind::kRegressor2) {
    throw Error(ErrorCode::kArity, "configuration estimate needs a regressor");
  }
  const auto v = regressor.predict_values(arm_features);
  const ArmConfig raw{v[0], v[1]};
  const ArmConfig c = clamp_to_limits(raw);
  if (counter) {
    ++counter->predictions;
    if (!(c == raw)) ++counter->clamped;
  }
  return c;
}

double link_collision(const LineSeg& from, const LineSeg& to,
                      std::span<const Rect> occupied, int n_lines) {
  const ConvexPolygon sweep = ConvexPolygon::hull({from.a, from.b, to.a, to.b});
  if (sweep.degenerate()) return 0.0;
  const Point2 motion = 0.5 * (to.a + to.b) - 0.5 * (from.a + from.b);
  const SampleAxis axis = std::abs(motion.y) >= std::abs(motion.x)
                              ? SampleAxis::kHorizontal
                              : SampleAxis::kVertical;
  return sampled_overlap_area(sweep, occupied, n_lines, axis);
}

std::vector<ArmConfig> estimate_arm_trace(const ArmModel& model,
                                          const KernelModel& regressor,
                                          std::span<const Point2> keypoints,
                                          const ArmConfig& initial,
                                          ClampCounter* counter) {
  std::vector<ArmConfig> trace;
  if (keypoints.empty()) return trace;
  trace.reserve(keypoints.size());
  trace.push_back(clamp_to_limits(initial));
  NormalizationContext ctx;
  ctx.arm_reach = model.reach();
  for (std::size_t i = 1; i < keypoints.size(); ++i) {
    const Direction h = approach_direction(keypoints[i - 1], keypoints[i]);
    const ArmFeatures f = arm_features(h, trace.back(), keypoints[i - 1], keypoints[i], ctx);
    const auto values = f.values();
    trace.push_back(estimate_configuration(regressor, values, counter));
  }
  return trace;
}

double trace_collision(const ArmModel& model, std::span<const ArmConfig> trace,
                       std::span<const Rect> occupied, int n_lines) {
  if (trace.size() < 2 || occupied.empty()) return 0.0;
  double total = 0.0;
  ArmPose prev = forward_kinematics(model, clamp_to_limits(trace[0]));
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const ArmPose next = forward_kinematics(model, clamp_to_limits(trace[i]));
    total += link_collision(prev.upper_arm_link(), next.upper_arm_link(), occupied, n_lines);
    total += link_collision(prev.forearm_link(), next.forearm_link(), occupied, n_lines);
    prev = next;
  }
  return total;
}

double path_collision(const ArmModel& model, const KernelModel& regressor,
                      std::span<const Point2> keypoints,
                      std::span<const Rect> occupied, int n_lines) {
  if (keypoints.empty()) return 0.0;
  return path_collision(model, regressor, keypoints, occupied, n_lines,
                        inverse_kinematics(model, keypoints.front()));
}

double path_collision(const ArmModel& model, const KernelModel& regressor,
                      std::span<const Point2> keypoints,
                      std::span<const Rect> occupied, int n_lines,
                      const ArmConfig& initial) {
  if (keypoints.size() < 2) return 0.0;
  const std::vector<ArmConfig> trace =
      estimate_arm_trace(model, regressor, keypoints, initial);
  return trace_collision(model, trace, occupied, n_lines);
}

}  // namespace hlp
