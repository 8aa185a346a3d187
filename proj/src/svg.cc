#include "hlp/svg.h"

#include <cstdio>
#include <sstream>

#include "hlp/arm.h"

namespace hlp {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

class Canvas {
 public:
  Canvas(const Table& table, const RenderOptions& o) : table_(table), o_(o) {}

  double px(double x) const { return (x + o_.margin) * o_.pixels_per_meter; }
  double py(double y) const { return (table_.height + o_.margin - y) * o_.pixels_per_meter; }
  double len(double d) const { return d * o_.pixels_per_meter; }
  double width() const { return len(table_.width + 2 * o_.margin); }
  double height() const { return len(table_.height + 2 * o_.margin); }

  std::string rect(const Rect& r, std::string_view cls, std::string_view fill) const {
    std::ostringstream s;
    s << "<rect class=\"" << cls << "\" x=\"" << num(px(r.lo_x())) << "\" y=\""
      << num(py(r.hi_y())) << "\" width=\"" << num(len(r.width())) << "\" height=\""
      << num(len(r.height())) << "\" fill=\"" << fill << "\"/>";
    return s.str();
  }

  std::string circle(Point2 c, double r_px, std::string_view cls, std::string_view fill) const {
    std::ostringstream s;
    s << "<circle class=\"" << cls << "\" cx=\"" << num(px(c.x)) << "\" cy=\"" << num(py(c.y))
      << "\" r=\"" << num(r_px) << "\" fill=\"" << fill << "\"/>";
    return s.str();
  }

  std::string line(Point2 a, Point2 b, std::string_view cls, std::string_view stroke,
                   double width_px) const {
    std::ostringstream s;
    s << "<line class=\"" << cls << "\" x1=\"" << num(px(a.x)) << "\" y1=\"" << num(py(a.y))
      << "\" x2=\"" << num(px(b.x)) << "\" y2=\"" << num(py(b.y)) << "\" stroke=\"" << stroke
      << "\" stroke-width=\"" << num(width_px) << "\"/>";
    return s.str();
  }

 private:
  const Table& table_;
  const RenderOptions& o_;
};

std::string object_shape(const Canvas& c, const SceneObject& o, std::string_view fill) {
  if (o.shape == Shape::kCylinder) {
    return c.circle(o.footprint.center, c.len(o.footprint.half_w), "obj", fill);
  }
  return c.rect(o.footprint, "obj", fill);
}

}  // namespace

std::string render_svg(const Scene& scene, const Plan* plan, const RenderOptions& options) {
  const Canvas c(scene.table, options);
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(c.width()) << "\" height=\""
    << num(c.height()) << "\" viewBox=\"0 0 " << num(c.width()) << ' ' << num(c.height())
    << "\">\n";
  s << "  " << c.rect(scene.table.rect(), "table", "#f3efe6") << '\n';
  for (const Rect& w : walls(scene.table)) s << "  " << c.rect(w, "wall", "#555555") << '\n';

  if (options.show_gaps) {
    const Decomposition d = decompose(scene);
    s << "  <g class=\"annotations\">\n";
    for (const Row& r : d.rows) {
      s << "    " << c.rect(Rect::from_bounds(0.0, r.y_lo, scene.table.width, r.y_hi), "row",
                            "#e0e7f0")
        << '\n';
    }
    for (const Gap& g : d.gaps) {
      s << "    " << c.rect(Rect::from_bounds(g.x_lo, g.y_lo, g.x_hi, g.y_hi), "gap", "#c9ecc9")
        << '\n';
    }
    s << "  </g>\n";
  }

  for (const SceneObject& o : scene.objects) {
    s << "  " << object_shape(c, o, o.movable ? "#8aa6c1" : "#6b6b6b") << '\n';
  }
  s << "  " << object_shape(c, scene.target, "#d9534f") << '\n';

  if (plan) {
    const std::vector<Point2> pts = plan->points();
    if (options.show_arm) {
      const ArmModel arm = arm_model_for(scene);
      s << "  <g class=\"annotations\">\n";
      for (const Keypoint& k : plan->keypoints) {
        const ArmPose p = forward_kinematics(arm, clamp_to_limits(k.config));
        s << "    " << c.line(arm.neck, p.shoulder, "arm", "#b0b0b0", 2.0) << '\n';
        s << "    " << c.line(p.shoulder, p.elbow, "arm", "#b0b0b0", 2.0) << '\n';
        s << "    " << c.line(p.elbow, p.hand, "arm", "#b0b0b0", 2.0) << '\n';
      }
      for (const Keypoint& k : plan->keypoints) {
        if (k.new_pos) s << "    " << c.line(k.position, *k.new_pos, "move", "#f0ad4e", 2.0) << '\n';
      }
      s << "  </g>\n";
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
      s << "  " << c.line(pts[i - 1], pts[i], "seg", "#222222", 3.0) << '\n';
    }
    for (const Point2& p : pts) s << "  " << c.circle(p, 5.0, "kp", "#222222") << '\n';
  }
  s << "</svg>\n";
  return s.str();
}

int counted_element_count(const Scene& scene, const Plan* plan) {
  const int k = plan ? static_cast<int>(plan->keypoints.size()) : 0;
  return static_cast<int>(scene.objects.size()) + 1 + 4 + k + (k > 0 ? k - 1 : 0);
}

}  // namespace hlp
