#include "oracles.h"

#include <string>

#include "hlp/experiments.h"
#include "hlp/scene_gen.h"

namespace hlp::testing {

bool inside_any(Point2 p, std::span<const Rect> rects) {
  for (const Rect& r : rects) {
    if (p.x >= r.lo_x() && p.x <= r.hi_x() && p.y >= r.lo_y() && p.y <= r.hi_y()) return true;
  }
  return false;
}

std::vector<Rect> off_table(const Table& t) {
  const double k = 100.0;
  return {Rect::from_bounds(-k, -k, 0.0, k), Rect::from_bounds(t.width, -k, k, k),
          Rect::from_bounds(-k, -k, k, 0.0), Rect::from_bounds(-k, t.height, k, k)};
}

double raster_area(const Rect& region, std::span<const Rect> occupied, int cells) {
  const double dx = region.width() / cells;
  const double dy = region.height() / cells;
  long hits = 0;
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      const Point2 p{region.lo_x() + (i + 0.5) * dx, region.lo_y() + (j + 0.5) * dy};
      if (inside_any(p, occupied)) ++hits;
    }
  }
  return hits * dx * dy;
}

double raster_area(const ConvexPolygon& region, std::span<const Rect> occupied, int cells) {
  if (region.degenerate()) return 0.0;
  const Rect b = region.bounds();
  if (b.half_w <= 0.0 || b.half_h <= 0.0) return 0.0;
  const double dx = b.width() / cells;
  const double dy = b.height() / cells;
  long hits = 0;
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      const Point2 p{b.lo_x() + (i + 0.5) * dx, b.lo_y() + (j + 0.5) * dy};
      if (region.contains(p) && inside_any(p, occupied)) ++hits;
    }
  }
  return hits * dx * dy;
}

Rect random_rect(std::mt19937_64& rng, double lo, double hi, double min_half, double max_half) {
  std::uniform_real_distribution<double> c(lo, hi);
  std::uniform_real_distribution<double> h(min_half, max_half);
  return {{c(rng), c(rng)}, h(rng), h(rng)};
}

Point2 random_point(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> c(lo, hi);
  return {c(rng), c(rng)};
}

Scene scaled(const Scene& scene, double k) {
  Scene s = scene;
  auto scale_rect = [k](Rect& r) {
    r.center = k * r.center;
    r.half_w *= k;
    r.half_h *= k;
  };
  s.start = k * s.start;
  scale_rect(s.target.footprint);
  for (SceneObject& o : s.objects) scale_rect(o.footprint);
  s.table.width *= k;
  s.table.height *= k;
  return s;
}

Scene translated(const Scene& scene, Point2 offset) {
  Scene s = scene;
  s.start = s.start + offset;
  s.target.footprint.center = s.target.footprint.center + offset;
  for (SceneObject& o : s.objects) o.footprint.center = o.footprint.center + offset;
  return s;
}

Scene random_canonical(std::uint64_t seed, double narrow_probability) {
  std::mt19937_64 rng(seed);
  return canonical_scene(rng, narrow_probability);
}

Scene row_scene(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                double half, double table_w, double table_h) {
  Scene s;
  s.table = {table_w, table_h};
  s.start = {table_w / 2, 0.0};
  s.target = {std::string(kTargetId), {{table_w / 2, table_h - 0.06}, 0.033, 0.033}, Shape::kCylinder,
              true};
  int n = 0;
  for (std::size_t r = 0; r < xs.size(); ++r) {
    for (double x : xs[r]) {
      s.objects.push_back({"o" + std::to_string(n++), {{x, ys[r]}, half, half}, Shape::kBox, true});
    }
  }
  return s;
}

const ModelSet& shared_models() {
  static const ModelSet models = synthetic_models(150, 11);
  return models;
}

}  // namespace hlp::testing
