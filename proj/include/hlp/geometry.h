#ifndef HLP_GEOMETRY_H_
#define HLP_GEOMETRY_H_

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace hlp {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

double dot(Point2 a, Point2 b);
double cross(Point2 a, Point2 b);
double norm(Point2 v);
bool is_finite(Point2 p);

// Axis-aligned rectangle given by its centre and half extents.
struct Rect {
  Point2 center;
  double half_w = 0.0;
  double half_h = 0.0;

  static Rect from_bounds(double lo_x, double lo_y, double hi_x, double hi_y);

  double lo_x() const { return center.x - half_w; }
  double hi_x() const { return center.x + half_w; }
  double lo_y() const { return center.y - half_h; }
  double hi_y() const { return center.y + half_h; }
  double width() const { return 2.0 * half_w; }
  double height() const { return 2.0 * half_h; }
  double area() const { return 4.0 * half_w * half_h; }
  double diagonal() const;
  bool valid() const;
  bool contains(Point2 p) const;
  Rect translated(Point2 offset) const { return {center + offset, half_w, half_h}; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

// Closed-interval intersection of two rects; nullopt when they do not meet
// with positive area.
std::optional<Rect> intersect(const Rect& a, const Rect& b);
double overlap_area(const Rect& a, const Rect& b);

struct LineSeg {
  Point2 a;
  Point2 b;

  double length() const;
  Point2 at(double t) const { return a + t * (b - a); }
};

double dist(Point2 p, Point2 q);

// Angle of (to - from) measured from the +y axis, positive towards +x,
// wrapped to (-pi, pi]. Throws kCoincidentPoints when from == to.
double orientation(Point2 from, Point2 to);

// Wraps an angle to (-pi, pi].
double wrap_angle(double radians);

// Parametric interval [t0, t1] of the segment lying inside the closed rect.
std::optional<std::pair<double, double>> clip_params(const LineSeg& s,
                                                     const Rect& r);

// Length of s inside r.
double seg_rect_clip(const LineSeg& s, const Rect& r);

// Length of the union of s ∩ r over all rects.
double covered_length(const LineSeg& s, std::span<const Rect> rects);

// max(0, min(a_hi, b_hi) - max(a_lo, b_lo)). Throws kInvalidInterval.
double overlap_1d(double a_lo, double a_hi, double b_lo, double b_hi);

// Orientation of the sampling lines: kHorizontal lines run along x and are
// stacked along y.
enum class SampleAxis { kHorizontal, kVertical };

inline constexpr int kDefaultSamplingLines = 64;

// Line-sampled estimate of area(region ∩ ∪occupied), clamped to
// [0, area(region)]. Lines sit at the midpoints of n_lines equal strips.
double sampled_overlap_area(const Rect& region, std::span<const Rect> occupied,
                            int n_lines = kDefaultSamplingLines,
                            SampleAxis axis = SampleAxis::kHorizontal);

class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  // Counter-clockwise convex hull of the points (monotone chain).
  static ConvexPolygon hull(std::vector<Point2> points);

  const std::vector<Point2>& vertices() const { return vertices_; }
  double area() const;
  Rect bounds() const;
  bool degenerate() const { return vertices_.size() < 3; }
  bool contains(Point2 p) const;

  // The part of the line {coordinate along the stacking axis == level} inside
  // the polygon, or nullopt when the line misses it.
  std::optional<LineSeg> chord(SampleAxis axis, double level) const;

 private:
  std::vector<Point2> vertices_;
};

double sampled_overlap_area(const ConvexPolygon& region,
                            std::span<const Rect> occupied,
                            int n_lines = kDefaultSamplingLines,
                            SampleAxis axis = SampleAxis::kHorizontal);

}  // namespace hlp

#endif  // HLP_GEOMETRY_H_
