#include "hlp/sim.h"

#include <algorithm>
#include <cmath>
#include <deque>

namespace hlp {

WorldState initial_state(const Scene& scene) {
  return {scene, scene.start, {}};
}

namespace {

// Every object the effector can touch, the target included.
std::vector<SceneObject*> live_objects(WorldState& w) {
  std::vector<SceneObject*> out;
  if (!w.dropped.count(w.scene.target.id)) out.push_back(&w.scene.target);
  for (SceneObject& o : w.scene.objects) {
    if (!w.dropped.count(o.id)) out.push_back(&o);
  }
  return out;
}

bool strictly_inside(const Rect& r, Point2 p) {
  return p.x > r.lo_x() && p.x < r.hi_x() && p.y > r.lo_y() && p.y < r.hi_y();
}

// Translation of r that puts p on its nearest edge.
Point2 point_mtv(const Rect& r, Point2 p) {
  const double left = p.x - r.lo_x();
  const double right = r.hi_x() - p.x;
  const double down = p.y - r.lo_y();
  const double up = r.hi_y() - p.y;
  const double m = std::min({left, right, down, up});
  if (m == left) return {left, 0.0};
  if (m == right) return {-right, 0.0};
  if (m == down) return {0.0, down};
  return {0.0, -up};
}

// Translation of `b` that separates it from `a` along the axis of least
// overlap, or zero when they do not overlap.
Point2 rect_mtv(const Rect& a, const Rect& b) {
  const double ox = std::min(a.hi_x(), b.hi_x()) - std::max(a.lo_x(), b.lo_x());
  const double oy = std::min(a.hi_y(), b.hi_y()) - std::max(a.lo_y(), b.lo_y());
  if (ox <= 1e-12 || oy <= 1e-12) return {0.0, 0.0};
  if (ox < oy) return {b.center.x >= a.center.x ? ox : -ox, 0.0};
  return {0.0, b.center.y >= a.center.y ? oy : -oy};
}

}  // namespace

WorldState step(const WorldState& state, Point2 u, const SimParams& params, double* pushed) {
  WorldState w = state;
  const Table& table = w.scene.table;
  const double len = norm(u);
  const int n_sub = std::max(1, static_cast<int>(std::ceil(len / params.substep)));
  const Point2 du = (1.0 / n_sub) * u;
  double moved_total = 0.0;

  for (int s = 0; s < n_sub; ++s) {
    WorldState next = w;
    Point2 e = next.effector + du;
    e.x = std::clamp(e.x, -params.workspace_margin, table.width + params.workspace_margin);
    e.y = std::clamp(e.y, -params.workspace_margin, table.height + params.workspace_margin);
    next.effector = e;
    double moved = 0.0;

    std::vector<SceneObject*> objs = live_objects(next);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      if (!strictly_inside(objs[i]->footprint, e)) continue;
      const Point2 t = point_mtv(objs[i]->footprint, e);
      objs[i]->footprint.center = objs[i]->footprint.center + t;
      moved += norm(t);
      queue.push_back(i);
    }
    // Chained resolution: a moved object shoves whatever it now overlaps.
    int rounds = 0;
    while (!queue.empty() && rounds < params.max_resolution_rounds * static_cast<int>(objs.size() + 1)) {
      ++rounds;
      const std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j = 0; j < objs.size(); ++j) {
        if (j == i) continue;
        const Point2 t = rect_mtv(objs[i]->footprint, objs[j]->footprint);
        if (t.x == 0.0 && t.y == 0.0) continue;
        objs[j]->footprint.center = objs[j]->footprint.center + t;
        moved += norm(t);
        queue.push_back(j);
      }
    }
    // The target is held: anything that would shift it jams the effector.
    const Point2 tc = next.scene.target.footprint.center;
    const Point2 tc0 = w.scene.target.footprint.center;
    if (tc.x != tc0.x || tc.y != tc0.y) break;
    for (SceneObject* o : objs) {
      if (!table.rect().contains(o->footprint.center)) next.dropped.insert(o->id);
    }
    w = std::move(next);
    moved_total += moved;
  }
  if (pushed) *pushed = moved_total;
  return w;
}

double residual_overlap(const WorldState& state) {
  std::vector<const SceneObject*> objs;
  if (!state.dropped.count(state.scene.target.id)) objs.push_back(&state.scene.target);
  for (const SceneObject& o : state.scene.objects) {
    if (!state.dropped.count(o.id)) objs.push_back(&o);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    for (std::size_t j = i + 1; j < objs.size(); ++j) {
      total += overlap_area(objs[i]->footprint, objs[j]->footprint);
    }
  }
  return total;
}

RolloutResult rollout(const WorldState& state, const std::vector<Point2>& controls,
                      const RolloutOptions& options) {
  RolloutResult r;
  r.final = state;
  if (options.record_trace) r.effector_trace.push_back(state.effector);
  for (const Point2& u : controls) {
    double pushed = 0.0;
    r.final = step(r.final, u, options.sim, &pushed);
    r.pushed += pushed;
    if (options.record_trace) r.effector_trace.push_back(r.final.effector);
  }
  r.final_distance = dist(r.final.effector, r.final.scene.target.footprint.center);
  const bool target_lost = r.final.dropped.count(r.final.scene.target.id) > 0;
  r.success = !target_lost && r.final.dropped.empty() &&
              r.final_distance <= options.pre_grasp_radius;
  const CostWeights& w = options.weights;
  r.cost = w.distance * r.final_distance + w.push * r.pushed +
           w.dropped * static_cast<double>(r.final.dropped.size());
  return r;
}

}  // namespace hlp
