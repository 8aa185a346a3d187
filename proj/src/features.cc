#include "hlp/features.h"

#include <numbers>

#include "hlp/error.h"

namespace hlp {

namespace {

constexpr double kPi = std::numbers::pi;

template <std::size_t N>
void put_one_hot(std::array<double, N>& out, std::size_t offset, Direction d) {
  for (int i = 0; i < kNumDirections; ++i) out[offset + i] = 0.0;
  out[offset + index_of(d)] = 1.0;
}

}  // namespace

NormalizationContext make_context(const Scene& scene, const ArmModel& arm) {
  NormalizationContext ctx;
  ctx.table_diag = scene.table.diagonal();
  ctx.table_area = scene.table.area();
  ctx.n_objects = std::max<int>(1, static_cast<int>(scene.objects.size()));
  ctx.arm_reach = arm.reach();
  return ctx;
}

std::array<double, kGapArity> GapFeatures::values() const {
  return {d_gs, d_gt, l_g, theta_gs, theta_gt};
}

std::array<double, kObjectArity> ObjectFeatures::values() const {
  return {d_os, d_ot, l_o, theta_os, theta_ot, l_ot, a_ofs};
}

std::array<double, kDirectionArity> DirectionFeatures::values() const {
  std::array<double, kDirectionArity> v{};
  put_one_hot(v, 0, approach);
  v[8] = theta_ot;
  for (int i = 0; i < kNumDirections; ++i) v[9 + i] = free_fraction[i];
  return v;
}

std::array<double, kSegmentArity> SegmentFeatures::values() const {
  return {dx, dy, l_ct, theta_c, c_zeta};
}

std::array<double, kArmArity> ArmFeatures::values() const {
  std::array<double, kArmArity> v{};
  put_one_hot(v, 0, approach);
  v[8] = theta_sh_prev;
  v[9] = theta_el_prev;
  v[10] = dx;
  v[11] = dy;
  return v;
}

double relative_orientation(const Scene& scene, Point2 from, Point2 to) {
  if (from == to) return 0.0;
  const Point2 target = scene.target.footprint.center;
  const double axis = scene.start == target ? 0.0 : orientation(scene.start, target);
  return wrap_angle(orientation(from, to) - axis);
}

GapFeatures gap_features(const Gap& gap, const Scene& scene,
                         const NormalizationContext& ctx) {
  const Point2 target = scene.target.footprint.center;
  GapFeatures f;
  f.d_gs = dist(gap.center, scene.start) / ctx.table_diag;
  f.d_gt = dist(gap.center, target) / ctx.table_diag;
  f.l_g = gap.diagonal / ctx.table_diag;
  f.theta_gs = relative_orientation(scene, scene.start, gap.center) / kPi;
  f.theta_gt = relative_orientation(scene, gap.center, target) / kPi;
  return f;
}

ObjectFeatures object_features(const SceneObject& obj, const Scene& scene,
                               const NormalizationContext& ctx, double alpha,
                               int n_lines) {
  const Rect& fp = obj.footprint;
  const Rect& target = scene.target.footprint;
  ObjectFeatures f;
  f.d_os = dist(fp.center, scene.start) / ctx.table_diag;
  f.d_ot = dist(fp.center, target.center) / ctx.table_diag;
  f.l_o = fp.diagonal() / ctx.table_diag;
  f.theta_os = relative_orientation(scene, scene.start, fp.center) / kPi;
  f.theta_ot = relative_orientation(scene, fp.center, target.center) / kPi;
  f.l_ot = overlap_1d(fp.lo_x(), fp.hi_x(), target.lo_x(), target.hi_x()) /
           target.width();
  const DirectionBlocks blocks = direction_blocks(obj, scene, alpha, n_lines);
  f.a_ofs = blocks.total_free() / blocks.total_area();
  return f;
}

DirectionFeatures direction_features(const SceneObject& obj, Direction approach,
                                     const Scene& scene,
                                     const NormalizationContext& ctx,
                                     const DirectionBlocks& blocks) {
  (void)ctx;
  DirectionFeatures f;
  f.approach = approach;
  f.theta_ot =
      relative_orientation(scene, obj.footprint.center, scene.target.footprint.center) / kPi;
  for (int i = 0; i < kNumDirections; ++i) {
    f.free_fraction[i] = blocks.free_area[i] / blocks.blocks[i].area();
  }
  return f;
}

DirectionFeatures direction_features(const SceneObject& obj, Direction approach,
                                     const Scene& scene,
                                     const NormalizationContext& ctx,
                                     double alpha, int n_lines) {
  return direction_features(obj, approach, scene, ctx,
                            direction_blocks(obj, scene, alpha, n_lines));
}

PlanElement element_for(const Gap& gap) {
  PlanElement e;
  e.kind = PlanElement::Kind::kGap;
  e.id = gap.id();
  e.row = gap.row_index;
  e.position = gap.center;
  e.x_lo = gap.x_lo;
  e.x_hi = gap.x_hi;
  return e;
}

PlanElement element_for(const SceneObject& obj, int row) {
  PlanElement e;
  e.kind = PlanElement::Kind::kObject;
  e.id = obj.id;
  e.row = row;
  e.position = obj.footprint.center;
  e.x_lo = obj.footprint.lo_x();
  e.x_hi = obj.footprint.hi_x();
  return e;
}

double segment_collision(const ArmModel& model, const ArmConfig& from,
                         const ArmConfig& to, const Scene& scene,
                         std::span<const std::string> skip_ids, int n_lines) {
  const std::vector<Rect> obstacles = obstacle_footprints(scene, skip_ids);
  const ArmConfig trace[2] = {from, to};
  return trace_collision(model, trace, obstacles, n_lines);
}

SegmentFeatures segment_features(const PlanElement& e1, const PlanElement& e2,
                                 const Scene& scene,
                                 const NormalizationContext& ctx,
                                 const ArmTrace& arm_trace, int n_lines) {
  if (e2.row != e1.row + 1) {
    throw Error(ErrorCode::kRowOrder, "segment from row " + std::to_string(e1.row) +
                                          " to row " + std::to_string(e2.row));
  }
  const Rect& target = scene.target.footprint;
  SegmentFeatures f;
  f.dx = (e2.position.x - e1.position.x) / ctx.table_diag;
  f.dy = (e2.position.y - e1.position.y) / ctx.table_diag;
  f.l_ct = overlap_1d(std::min(e1.x_lo, e2.x_lo), std::max(e1.x_hi, e2.x_hi),
                      target.lo_x(), target.hi_x()) /
           target.width();
  f.theta_c = relative_orientation(scene, e1.position, e2.position) / kPi;
  std::vector<std::string> skip;
  if (e1.is_object()) skip.push_back(e1.id);
  if (e2.is_object()) skip.push_back(e2.id);
  f.c_zeta = segment_collision(arm_trace.model, arm_trace.at_e1, arm_trace.at_e2,
                               scene, skip, n_lines) /
             ctx.table_area;
  return f;
}

ArmFeatures arm_features(Direction approach, const ArmConfig& prev_config,
                         Point2 k_prev, Point2 k_next,
                         const NormalizationContext& ctx) {
  ArmFeatures f;
  f.approach = approach;
  f.theta_sh_prev = prev_config.theta_sh;
  f.theta_el_prev = prev_config.theta_el;
  f.dx = (k_next.x - k_prev.x) / ctx.arm_reach;
  f.dy = (k_next.y - k_prev.y) / ctx.arm_reach;
  return f;
}

Direction approach_direction(Point2 from, Point2 to) {
  if (from == to) return Direction::kFF;
  return quantize_direction(to - from);
}

}  // namespace hlp
