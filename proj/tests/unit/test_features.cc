#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hlp/error.h"
#include "hlp/features.h"
#include "oracles.h"

using namespace hlp;
using hlp::testing::random_canonical;
using hlp::testing::raster_area;
using hlp::testing::row_scene;

namespace {

constexpr double kPi = std::numbers::pi;

double ref_angle(Point2 s, Point2 t, Point2 from, Point2 to) {
  double a = std::atan2(to.x - from.x, to.y - from.y) - std::atan2(t.x - s.x, t.y - s.y);
  while (a <= -kPi) a += 2 * kPi;
  while (a > kPi) a -= 2 * kPi;
  return a / kPi;
}

double ref_sweep(const ArmModel& arm, const ArmConfig& a, const ArmConfig& b,
                 const std::vector<Rect>& obstacles) {
  const ArmPose p = forward_kinematics(arm, a);
  const ArmPose q = forward_kinematics(arm, b);
  const ConvexPolygon upper = ConvexPolygon::hull({p.shoulder, p.elbow, q.shoulder, q.elbow});
  const ConvexPolygon fore = ConvexPolygon::hull({p.elbow, p.hand, q.elbow, q.hand});
  return raster_area(upper, obstacles) + raster_area(fore, obstacles);
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("gap features on the start-target axis") {
  // Dyadic coordinates keep the symmetric fixture exact.
  const Scene s = row_scene({{0.25, 0.75}}, {0.25}, 0.0625, 1.0, 0.5);
  const Decomposition d = decompose(s);
  const NormalizationContext ctx = make_context(s, arm_model_for(s));
  const Gap* mid = d.gaps_in_row(0)[1];
  REQUIRE(mid->center.x == 0.5);
  const GapFeatures f = gap_features(*mid, s, ctx);
  CHECK(f.theta_gs == 0.0);
  CHECK(f.theta_gt == 0.0);

  Gap at_start = *mid;
  at_start.center = s.start;
  CHECK(gap_features(at_start, s, ctx).d_gs == 0.0);
}

TEST_CASE("gap and object features match recomputation") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Scene s = random_canonical(seed);
    const Decomposition d = decompose(s);
    const NormalizationContext ctx = make_context(s, arm_model_for(s));
    const double diag = std::hypot(s.table.width, s.table.height);
    const Point2 t = s.target.footprint.center;
    for (const Gap& g : d.gaps) {
      const auto v = gap_features(g, s, ctx).values();
      CHECK(v[0] == doctest::Approx(std::hypot(g.center.x - s.start.x, g.center.y - s.start.y) / diag).epsilon(1e-12));
      CHECK(v[1] == doctest::Approx(std::hypot(g.center.x - t.x, g.center.y - t.y) / diag).epsilon(1e-12));
      CHECK(v[2] == doctest::Approx(std::hypot(g.width, g.y_hi - g.y_lo) / diag).epsilon(1e-12));
      CHECK(v[3] == doctest::Approx(ref_angle(s.start, t, s.start, g.center)).epsilon(1e-12));
      CHECK(v[4] == doctest::Approx(ref_angle(s.start, t, g.center, t)).epsilon(1e-12));
      for (double x : v) {
        CHECK(x >= -1.0 - 1e-12);
        CHECK(x <= 1.0 + 1e-12);
      }
    }
    for (const SceneObject& o : s.objects) {
      const ObjectFeatures f = object_features(o, s, ctx);
      const Rect& r = o.footprint;
      const Rect& tr = s.target.footprint;
      const double ov = std::max(0.0, std::min(r.hi_x(), tr.hi_x()) - std::max(r.lo_x(), tr.lo_x()));
      CHECK(f.l_ot == doctest::Approx(ov / tr.width()).epsilon(1e-12));
      CHECK(f.l_o == doctest::Approx(2 * std::hypot(r.half_w, r.half_h) / diag).epsilon(1e-12));
      CHECK(f.theta_ot == doctest::Approx(ref_angle(s.start, t, r.center, t)).epsilon(1e-12));
      for (double x : f.values()) {
        CHECK(x >= -1.0 - 1e-12);
        CHECK(x <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("object features") {
  Scene s = row_scene({{0.4}}, {0.2}, 0.033);
  const NormalizationContext ctx = make_context(s, arm_model_for(s));
  const ObjectFeatures f = object_features(s.objects[0], s, ctx);
  CHECK(f.l_ot == doctest::Approx(1.0));
  CHECK(f.a_ofs == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("free-space measure against rasterization") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Scene s = random_canonical(seed);
    const NormalizationContext ctx = make_context(s, arm_model_for(s));
    for (const SceneObject& o : s.objects) {
      const DirectionBlocks b = direction_blocks(o, s);
      std::vector<Rect> blocked{s.target.footprint};
      for (const SceneObject& p : s.objects) if (p.id != o.id) blocked.push_back(p.footprint);
      for (const Rect& w : hlp::testing::off_table(s.table)) blocked.push_back(w);
      double free = 0.0, total = 0.0;
      for (const Rect& blk : b.blocks) {
        free += blk.area() - raster_area(blk, blocked, 256);
        total += blk.area();
      }
      CHECK(object_features(o, s, ctx).a_ofs == doctest::Approx(free / total).epsilon(0.05));
    }
  }
}

TEST_CASE("direction features") {
  Scene s = row_scene({{0.4}}, {0.2});
  s.target.footprint.center = {0.1, 0.38};
  const NormalizationContext ctx = make_context(s, arm_model_for(s));
  const DirectionFeatures f = direction_features(s.objects[0], Direction::kFF, s, ctx);
  const auto v = f.values();
  CHECK(v[0] == 1.0);
  double hot = 0.0;
  for (int i = 0; i < 8; ++i) hot += v[i];
  CHECK(hot == 1.0);
  for (int i = 0; i < 8; ++i) CHECK(f.free_fraction[i] == doctest::Approx(f.free_fraction[0]).epsilon(0.02));

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scene r = random_canonical(seed);
    const NormalizationContext c = make_context(r, arm_model_for(r));
    for (const SceneObject& o : r.objects) {
      const DirectionBlocks b = direction_blocks(o, r);
      const DirectionFeatures df = direction_features(o, Direction::kLL, r, c);
      for (int k = 0; k < 8; ++k) CHECK(df.free_fraction[k] == b.free_area[k] / b.blocks[k].area());
    }
  }
}

TEST_CASE("segment features") {
  const Scene s = row_scene({{0.25, 0.55}, {0.25, 0.55}}, {0.12, 0.26});
  const Decomposition d = decompose(s);
  const ArmModel arm = arm_model_for(s);
  const NormalizationContext ctx = make_context(s, arm);
  const PlanElement e1 = element_for(*d.gaps_in_row(0)[1]);
  const PlanElement e2 = element_for(*d.gaps_in_row(1)[1]);
  const ArmTrace tr{arm, inverse_kinematics(arm, e1.position), inverse_kinematics(arm, e2.position)};
  const SegmentFeatures f = segment_features(e1, e2, s, ctx, tr);
  CHECK(f.dx == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.theta_c == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.l_ct == doctest::Approx(1.0));
  CHECK(f.c_zeta >= 0.0);
  CHECK_THROWS_AS(segment_features(e2, e1, s, ctx, tr), Error);

  PlanElement a = element_for(*d.gaps_in_row(0)[0]);
  PlanElement b = element_for(*d.gaps_in_row(1)[2]);
  const SegmentFeatures fab = segment_features(a, b, s, ctx, tr);
  std::swap(a.position.x, b.position.x);
  const SegmentFeatures fba = segment_features(a, b, s, ctx, tr);
  CHECK(fba.dx == doctest::Approx(-fab.dx).epsilon(1e-12));
}

TEST_CASE("segment collision against rasterized sweep") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Scene s = random_canonical(seed);
    const Decomposition d = decompose(s);
    const ArmModel arm = arm_model_for(s);
    const NormalizationContext ctx = make_context(s, arm);
    for (const Gap* g1 : d.gaps_in_row(0)) {
      for (const Gap* g2 : d.gaps_in_row(1)) {
        const PlanElement e1 = element_for(*g1), e2 = element_for(*g2);
        const ArmTrace tr{arm, inverse_kinematics(arm, e1.position),
                          inverse_kinematics(arm, e2.position)};
        const double got = segment_features(e1, e2, s, ctx, tr).c_zeta * ctx.table_area;
        const double oracle = ref_sweep(arm, tr.at_e1, tr.at_e2, obstacle_footprints(s));
        const double floor = 0.002;  // m^2; tiny sweeps are judged absolutely
        CHECK(std::abs(got - oracle) <= 0.1 * std::max(oracle, floor));
        ++checked;
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("arm features") {
  const NormalizationContext ctx{1.0, 1.0, 6, 0.58};
  const ArmConfig prev{0.3, 1.2};
  const ArmFeatures still = arm_features(Direction::kFF, prev, {0.2, 0.3}, {0.2, 0.3}, ctx);
  CHECK(still.dx == 0.0);
  CHECK(still.dy == 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 100; ++i) {
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, off{u(rng), u(rng)};
    const auto f = arm_features(Direction::kBL, prev, a, b, ctx).values();
    const auto g = arm_features(Direction::kBL, prev, a + off, b + off, ctx).values();
    for (int k = 0; k < kArmArity; ++k) CHECK(f[k] == doctest::Approx(g[k]).epsilon(1e-12));
    CHECK(f[3] == 1.0);
    CHECK(f[8] == prev.theta_sh);
    CHECK(f[9] == prev.theta_el);
    CHECK(f[10] == doctest::Approx((b.x - a.x) / 0.58).epsilon(1e-12));
    CHECK(f[11] == doctest::Approx((b.y - a.y) / 0.58).epsilon(1e-12));
  }
}

}
