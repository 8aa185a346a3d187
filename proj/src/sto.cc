#include "hlp/sto.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace hlp {

double STOConfig::pre_grasp_radius(const Scene& scene) const {
  return std::max(scene.target.footprint.half_w, scene.target.footprint.half_h) +
         pre_grasp_margin;
}

RolloutOptions STOConfig::rollout_options(const Scene& scene) const {
  RolloutOptions o;
  o.pre_grasp_radius = pre_grasp_radius(scene);
  o.weights = weights;
  o.sim = sim;
  return o;
}

ControlSequence straight_line(Point2 from, Point2 to, double u_max) {
  ControlSequence out;
  const Point2 v = to - from;
  const double d = norm(v);
  if (d <= 0.0) return out;
  const Point2 unit = (1.0 / d) * v;
  const auto full = static_cast<std::size_t>(std::floor(d / u_max));
  Point2 sum;
  for (std::size_t i = 0; i < full; ++i) {
    out.push_back(u_max * unit);
    sum = sum + out.back();
  }
  const Point2 rest = v - sum;
  if (norm(rest) > 1e-12) out.push_back(rest);
  else if (!out.empty()) out.back() = out.back() + rest;
  return out;
}

ControlSequence straight_line_init(const WorldState& state, const STOConfig& cfg) {
  return straight_line(state.effector, state.scene.target.footprint.center, cfg.u_max);
}

namespace {

constexpr double kPushClearance = 0.01;

bool cuts(Point2 a, Point2 b, const Rect& r) {
  const LineSeg s{a, b};
  const auto t = clip_params(s, r);
  return t && (t->second - t->first) * s.length() > 1e-9;
}

double polyline_length(const std::vector<Point2>& pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += dist(pts[i - 1], pts[i]);
  return len;
}

// Shortest detour from `from` to `to` around `body` via at most two corners
// of a slightly larger box. Returns the intermediate points only.
std::vector<Point2> route_around(Point2 from, Point2 to, const Rect& body) {
  if (!cuts(from, to, body)) return {};
  const Rect outer{body.center, body.half_w + 0.5 * kPushClearance,
                   body.half_h + 0.5 * kPushClearance};
  const std::array<Point2, 4> corners = {
      Point2{outer.lo_x(), outer.lo_y()}, Point2{outer.hi_x(), outer.lo_y()},
      Point2{outer.hi_x(), outer.hi_y()}, Point2{outer.lo_x(), outer.hi_y()}};
  std::vector<Point2> best;
  double best_len = std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<Point2> via) {
    std::vector<Point2> full{from};
    full.insert(full.end(), via.begin(), via.end());
    full.push_back(to);
    for (std::size_t i = 1; i < full.size(); ++i) {
      if (cuts(full[i - 1], full[i], body)) return;
    }
    const double len = polyline_length(full);
    if (len < best_len) {
      best_len = len;
      best = std::move(via);
    }
  };
  for (int i = 0; i < 4; ++i) {
    consider({corners[i]});
    consider({corners[i], corners[(i + 1) % 4]});
    consider({corners[i], corners[(i + 3) % 4]});
  }
  return best;
}

void go_to(std::vector<Point2>& pts, Point2 to, const Rect& body) {
  for (Point2 v : route_around(pts.back(), to, body)) pts.push_back(v);
  pts.push_back(to);
}

double sign(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

std::vector<Point2> hlp_waypoints(const Plan& plan, const WorldState& state) {
  std::vector<Point2> pts{state.effector};
  for (const Keypoint& k : plan.keypoints) {
    if (k.kind == Keypoint::Kind::kStart) continue;
    const SceneObject* obj =
        k.kind == Keypoint::Kind::kObject ? state.scene.find(k.element) : nullptr;
    if (!obj || !k.new_pos) {
      pts.push_back(k.position);
      continue;
    }
    const Rect fp = obj->footprint;
    const Point2 goal = *k.new_pos;
    Rect body = fp;
    const double dx = goal.x - fp.center.x;
    const double dy = goal.y - fp.center.y;
    if (std::abs(dx) > 1e-9) {
      const double sx = sign(dx);
      go_to(pts, {body.center.x - sx * (body.half_w + kPushClearance), body.center.y}, body);
      pts.push_back({goal.x - sx * body.half_w, body.center.y});
      body.center.x = goal.x;
    }
    if (std::abs(dy) > 1e-9) {
      const double sy = sign(dy);
      go_to(pts, {body.center.x, body.center.y - sy * (body.half_h + kPushClearance)}, body);
      pts.push_back({body.center.x, goal.y - sy * body.half_h});
      body.center.y = goal.y;
    }
    go_to(pts, k.position, body);
  }
  return pts;
}

ControlSequence hlp_init(const Plan& plan, const WorldState& state, const STOConfig& cfg) {
  const std::vector<Point2> pts = hlp_waypoints(plan, state);
  ControlSequence out;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const ControlSequence leg = straight_line(pts[i - 1], pts[i], cfg.u_max);
    out.insert(out.end(), leg.begin(), leg.end());
  }
  return out;
}

namespace {

Point2 clamp_step(Point2 u, double u_max) {
  const double n = norm(u);
  return n > u_max ? (u_max / n) * u : u;
}

}  // namespace

OptimizeResult optimize(const WorldState& state, const ControlSequence& init,
                        const STOConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const RolloutOptions opts = cfg.rollout_options(state.scene);

  OptimizeResult out;
  out.controls = init;
  for (Point2& u : out.controls) u = clamp_step(u, cfg.u_max);
  if (out.controls.size() < static_cast<std::size_t>(cfg.horizon)) {
    out.controls.resize(static_cast<std::size_t>(cfg.horizon), Point2{});
  }
  out.result = rollout(state, out.controls, opts);
  out.incumbent_costs.push_back(out.result.cost);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
  while (!out.result.success && out.iterations < cfg.n_iterations) {
    ++out.iterations;
    ControlSequence best_controls;
    RolloutResult best;
    best.cost = std::numeric_limits<double>::infinity();
    for (int s = 0; s < cfg.n_samples; ++s) {
      ControlSequence cand = out.controls;
      for (Point2& u : cand) {
        const double ex = noise(rng);
        const double ey = noise(rng);
        u = clamp_step(u + Point2{ex, ey}, cfg.u_max);
      }
      RolloutResult r = rollout(state, cand, opts);
      if (r.cost < best.cost) {
        best = std::move(r);
        best_controls = std::move(cand);
      }
    }
    if (best.cost < out.result.cost) {
      out.result = std::move(best);
      out.controls = std::move(best_controls);
    }
    out.incumbent_costs.push_back(out.result.cost);
  }
  out.opt_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace hlp
