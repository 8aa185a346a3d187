#include "hlp/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hlp/error.h"

namespace hlp {

double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double norm(Point2 v) { return std::hypot(v.x, v.y); }
bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

Rect Rect::from_bounds(double lo_x, double lo_y, double hi_x, double hi_y) {
  return {{0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)},
          0.5 * (hi_x - lo_x),
          0.5 * (hi_y - lo_y)};
}

double Rect::diagonal() const { return 2.0 * std::hypot(half_w, half_h); }

bool Rect::valid() const {
  return is_finite(center) && std::isfinite(half_w) && std::isfinite(half_h) &&
         half_w > 0.0 && half_h > 0.0;
}

bool Rect::contains(Point2 p) const {
  return p.x >= lo_x() && p.x <= hi_x() && p.y >= lo_y() && p.y <= hi_y();
}

std::optional<Rect> intersect(const Rect& a, const Rect& b) {
  const double lo_x = std::max(a.lo_x(), b.lo_x());
  const double hi_x = std::min(a.hi_x(), b.hi_x());
  const double lo_y = std::max(a.lo_y(), b.lo_y());
  const double hi_y = std::min(a.hi_y(), b.hi_y());
  if (hi_x <= lo_x || hi_y <= lo_y) return std::nullopt;
  return Rect::from_bounds(lo_x, lo_y, hi_x, hi_y);
}

double overlap_area(const Rect& a, const Rect& b) {
  const auto r = intersect(a, b);
  return r ? r->area() : 0.0;
}

double LineSeg::length() const { return dist(a, b); }

double dist(Point2 p, Point2 q) { return std::hypot(q.x - p.x, q.y - p.y); }

double wrap_angle(double radians) {
  double a = std::remainder(radians, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

double orientation(Point2 from, Point2 to) {
  if (from == to) {
    throw Error(ErrorCode::kCoincidentPoints, "orientation of a zero vector");
  }
  // atan2(x, y) measures from +y towards +x; its range is already (-pi, pi].
  return std::atan2(to.x - from.x, to.y - from.y);
}

std::optional<std::pair<double, double>> clip_params(const LineSeg& s,
                                                     const Rect& r) {
  const Point2 d = s.b - s.a;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {s.a.x - r.lo_x(), r.hi_x() - s.a.x, s.a.y - r.lo_y(),
                       r.hi_y() - s.a.y};
  double t0 = 0.0;
  double t1 = 1.0;
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return std::nullopt;
  }
  return std::pair{t0, t1};
}

double seg_rect_clip(const LineSeg& s, const Rect& r) {
  const auto t = clip_params(s, r);
  if (!t) return 0.0;
  return (t->second - t->first) * s.length();
}

double covered_length(const LineSeg& s, std::span<const Rect> rects) {
  std::vector<std::pair<double, double>> spans;
  for (const Rect& r : rects) {
    if (auto t = clip_params(s, r); t && t->second > t->first) {
      spans.push_back(*t);
    }
  }
  if (spans.empty()) return 0.0;
  std::sort(spans.begin(), spans.end());
  double covered = 0.0;
  double lo = spans.front().first;
  double hi = spans.front().second;
  for (const auto& [a, b] : spans) {
    if (a > hi) {
      covered += hi - lo;
      lo = a;
      hi = b;
    } else {
      hi = std::max(hi, b);
    }
  }
  covered += hi - lo;
  return covered * s.length();
}

double overlap_1d(double a_lo, double a_hi, double b_lo, double b_hi) {
  if (a_lo > a_hi || b_lo > b_hi) {
    throw Error(ErrorCode::kInvalidInterval, "interval with lo > hi");
  }
  return std::max(0.0, std::min(a_hi, b_hi) - std::max(a_lo, b_lo));
}

namespace {

bool boxes_touch(const Rect& a, const Rect& b) {
  return a.lo_x() <= b.hi_x() && b.lo_x() <= a.hi_x() && a.lo_y() <= b.hi_y() &&
         b.lo_y() <= a.hi_y();
}

std::vector<Rect> candidates_near(const Rect& bounds,
                                  std::span<const Rect> occupied) {
  std::vector<Rect> out;
  for (const Rect& r : occupied) {
    if (boxes_touch(bounds, r)) out.push_back(r);
  }
  return out;
}

}  // namespace

double sampled_overlap_area(const Rect& region, std::span<const Rect> occupied,
                            int n_lines, SampleAxis axis) {
  n_lines = std::max(n_lines, 2);
  const std::vector<Rect> near = candidates_near(region, occupied);
  if (near.empty()) return 0.0;
  const bool horizontal = axis == SampleAxis::kHorizontal;
  const double extent = horizontal ? region.height() : region.width();
  const double start = horizontal ? region.lo_y() : region.lo_x();
  const double spacing = extent / n_lines;
  double area = 0.0;
  for (int i = 0; i < n_lines; ++i) {
    const double level = start + (i + 0.5) * spacing;
    const LineSeg chord =
        horizontal ? LineSeg{{region.lo_x(), level}, {region.hi_x(), level}}
                   : LineSeg{{level, region.lo_y()}, {level, region.hi_y()}};
    area += covered_length(chord, near) * spacing;
  }
  return std::clamp(area, 0.0, region.area());
}

ConvexPolygon ConvexPolygon::hull(std::vector<Point2> points) {
  std::sort(points.begin(), points.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  ConvexPolygon poly;
  if (points.size() < 3) {
    poly.vertices_ = points;
    return poly;
  }
  std::vector<Point2> h(2 * points.size());
  std::size_t k = 0;
  for (const Point2& p : points) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], p - h[k - 2]) <= 0.0) --k;
    h[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    const Point2 p = points[i];
    while (k >= lower && cross(h[k - 1] - h[k - 2], p - h[k - 2]) <= 0.0) --k;
    h[k++] = p;
  }
  h.resize(k - 1);
  poly.vertices_ = std::move(h);
  return poly;
}

double ConvexPolygon::area() const {
  if (degenerate()) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    twice += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  }
  return 0.5 * std::abs(twice);
}

Rect ConvexPolygon::bounds() const {
  double lo_x = vertices_.front().x, hi_x = lo_x;
  double lo_y = vertices_.front().y, hi_y = lo_y;
  for (const Point2& p : vertices_) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  return Rect::from_bounds(lo_x, lo_y, hi_x, hi_y);
}

bool ConvexPolygon::contains(Point2 p) const {
  if (degenerate()) return false;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point2 a = vertices_[i];
    const Point2 b = vertices_[(i + 1) % vertices_.size()];
    if (cross(b - a, p - a) < 0.0) return false;
  }
  return true;
}

std::optional<LineSeg> ConvexPolygon::chord(SampleAxis axis,
                                            double level) const {
  if (degenerate()) return std::nullopt;
  const bool horizontal = axis == SampleAxis::kHorizontal;
  // Work in (along, across) coordinates: "across" is the stacking axis.
  auto across = [&](Point2 p) { return horizontal ? p.y : p.x; };
  auto along = [&](Point2 p) { return horizontal ? p.x : p.y; };
  double lo = 0.0, hi = 0.0;
  bool hit = false;
  auto take = [&](double v) {
    if (!hit) {
      lo = hi = v;
      hit = true;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  };
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point2 a = vertices_[i];
    const Point2 b = vertices_[(i + 1) % vertices_.size()];
    const double da = across(a) - level;
    const double db = across(b) - level;
    if (da == 0.0) take(along(a));
    if (db == 0.0) take(along(b));
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      take(along(a) + t * (along(b) - along(a)));
    }
  }
  if (!hit) return std::nullopt;
  if (horizontal) return LineSeg{{lo, level}, {hi, level}};
  return LineSeg{{level, lo}, {level, hi}};
}

double sampled_overlap_area(const ConvexPolygon& region,
                            std::span<const Rect> occupied, int n_lines,
                            SampleAxis axis) {
  if (region.degenerate()) return 0.0;
  n_lines = std::max(n_lines, 2);
  const Rect box = region.bounds();
  const std::vector<Rect> near = candidates_near(box, occupied);
  if (near.empty()) return 0.0;
  const bool horizontal = axis == SampleAxis::kHorizontal;
  const double extent = horizontal ? box.height() : box.width();
  const double start = horizontal ? box.lo_y() : box.lo_x();
  if (extent <= 0.0) return 0.0;
  const double spacing = extent / n_lines;
  double area = 0.0;
  for (int i = 0; i < n_lines; ++i) {
    const auto chord = region.chord(axis, start + (i + 0.5) * spacing);
    if (!chord || chord->length() == 0.0) continue;
    area += covered_length(*chord, near) * spacing;
  }
  return std::clamp(area, 0.0, region.area());
}

}  // namespace hlp
