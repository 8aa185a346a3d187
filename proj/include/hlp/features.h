#ifndef HLP_FEATURES_H_
#define HLP_FEATURES_H_

#include <array>
#include <string>
#include <vector>

#include "hlp/arm.h"
#include "hlp/geometry.h"
#include "hlp/scene.h"

namespace hlp {

inline constexpr int kGapArity = 5;
inline constexpr int kObjectArity = 7;
inline constexpr int kDirectionArity = 17;
inline constexpr int kSegmentArity = 5;
inline constexpr int kArmArity = 12;

struct NormalizationContext {
  double table_diag = 1.0;
  double table_area = 1.0;
  int n_objects = 1;
  double arm_reach = 1.0;
};

NormalizationContext make_context(const Scene& scene, const ArmModel& arm);

// Distances and lengths are divided by the table diagonal, angles by pi.
// Angles are relative to the start->target axis.
struct GapFeatures {
  double d_gs = 0, d_gt = 0, l_g = 0, theta_gs = 0, theta_gt = 0;
  std::array<double, kGapArity> values() const;
};

struct ObjectFeatures {
  double d_os = 0, d_ot = 0, l_o = 0, theta_os = 0, theta_ot = 0;
  double l_ot = 0;   // x-overlap with the target / target width
  double a_ofs = 0;  // free area in the eight blocks / their total area
  std::array<double, kObjectArity> values() const;
};

struct DirectionFeatures {
  Direction approach = Direction::kFF;
  double theta_ot = 0;
  std::array<double, kNumDirections> free_fraction{};
  std::array<double, kDirectionArity> values() const;
};

struct SegmentFeatures {
  double dx = 0, dy = 0, l_ct = 0, theta_c = 0, c_zeta = 0;
  std::array<double, kSegmentArity> values() const;
};

struct ArmFeatures {
  Direction approach = Direction::kFF;
  double theta_sh_prev = 0, theta_el_prev = 0;
  double dx = 0, dy = 0;  // keypoint delta / arm reach
  std::array<double, kArmArity> values() const;
};

// Angle of from->to relative to the scene's start->target axis, in (-pi, pi].
double relative_orientation(const Scene& scene, Point2 from, Point2 to);

GapFeatures gap_features(const Gap& gap, const Scene& scene,
                         const NormalizationContext& ctx);

ObjectFeatures object_features(const SceneObject& obj, const Scene& scene,
                               const NormalizationContext& ctx,
                               double alpha = kDefaultAlpha,
                               int n_lines = kDefaultSamplingLines);

DirectionFeatures direction_features(const SceneObject& obj, Direction approach,
                                     const Scene& scene,
                                     const NormalizationContext& ctx,
                                     double alpha = kDefaultAlpha,
                                     int n_lines = kDefaultSamplingLines);
DirectionFeatures direction_features(const SceneObject& obj, Direction approach,
                                     const Scene& scene,
                                     const NormalizationContext& ctx,
                                     const DirectionBlocks& blocks);

// A gap or an obstacle acted on in a given row.
struct PlanElement {
  enum class Kind { kGap, kObject };

  Kind kind = Kind::kGap;
  std::string id;
  int row = 0;
  Point2 position;
  double x_lo = 0.0;
  double x_hi = 0.0;

  bool is_object() const { return kind == Kind::kObject; }
};

PlanElement element_for(const Gap& gap);
PlanElement element_for(const SceneObject& obj, int row);

// Arm configurations at the two segment ends, used for c_zeta.
struct ArmTrace {
  ArmModel model;
  ArmConfig at_e1;
  ArmConfig at_e2;
};

// Collision of the arm moving between two configurations, against the
// obstacles other than the ones acted on.
double segment_collision(const ArmModel& model, const ArmConfig& from,
                         const ArmConfig& to, const Scene& scene,
                         std::span<const std::string> skip_ids,
                         int n_lines = kDefaultSamplingLines);

// Throws kRowOrder unless e2 sits in the row right after e1.
SegmentFeatures segment_features(const PlanElement& e1, const PlanElement& e2,
                                 const Scene& scene,
                                 const NormalizationContext& ctx,
                                 const ArmTrace& arm_trace,
                                 int n_lines = kDefaultSamplingLines);

ArmFeatures arm_features(Direction approach, const ArmConfig& prev_config,
                         Point2 k_prev, Point2 k_next,
                         const NormalizationContext& ctx);

// Hand direction when moving between two keypoints; FF for a null move.
Direction approach_direction(Point2 from, Point2 to);

}  // namespace hlp

#endif  // HLP_FEATURES_H_
