#include "hlp/scene_gen.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hlp/error.h"

namespace hlp {

namespace {

constexpr double kTargetHalf = 0.033;
constexpr double kEdgeMargin = 0.01;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) {
  return std::bernoulli_distribution(p)(rng);
}

// Row centre heights for n rows on a table of depth h, and the target height.
double row_y(int i, int n, double h) { return h * (0.15 + 0.55 * (i + 0.5) / n); }
double target_y(double h) { return 0.82 * h; }

std::optional<Scene> try_generate(std::mt19937_64& rng, const SceneGenOptions& opt) {
  Scene scene;
  scene.table = {opt.table_w, opt.table_h};
  const double w = opt.table_w;
  const double h = opt.table_h;
  const double target_x = opt.aligned ? w / 2 + uniform(rng, -0.05, 0.05) * w / 0.8
                                      : uniform(rng, 0.15 * w, 0.85 * w);
  const double start_x = opt.aligned ? target_x : uniform(rng, 0.15 * w, 0.85 * w);
  scene.start = {start_x, 0.0};
  scene.target.id = std::string(kTargetId);
  scene.target.shape = Shape::kCylinder;
  scene.target.footprint = {{target_x, target_y(h)}, kTargetHalf, kTargetHalf};

  const int n_rows = static_cast<int>(opt.objects_per_row.size());
  int next_id = 1;
  for (int r = 0; r < n_rows; ++r) {
    const int k = opt.objects_per_row[r];
    if (k <= 0) continue;
    const double y = row_y(r, n_rows, h) + uniform(rng, -0.004, 0.004) * h / 0.45;
    std::vector<SceneObject> row(k);
    double occupied = 0.0;
    for (int i = 0; i < k; ++i) {
      SceneObject& o = row[i];
      const bool cyl = opt.cylinders && (!opt.boxes || coin(rng, 0.5));
      o.shape = cyl ? Shape::kCylinder : Shape::kBox;
      if (cyl) {
        const double rad = uniform(rng, 0.03, 0.04) * opt.size_scale;
        o.footprint.half_w = rad;
        o.footprint.half_h = rad;
      } else {
        o.footprint.half_w = uniform(rng, 0.03, 0.05) * opt.size_scale;
        o.footprint.half_h = uniform(rng, 0.025, 0.035) * opt.size_scale;
      }
      occupied += o.footprint.width();
    }
    std::vector<double> inner(std::max(0, k - 1));
    for (double& g : inner) {
      g = coin(rng, opt.narrow_probability) ? uniform(rng, 0.03, 0.08)
                                            : uniform(rng, 0.1, 0.2);
    }
    double cluster = occupied + std::accumulate(inner.begin(), inner.end(), 0.0);
    const double room = w - 2 * kEdgeMargin;
    if (cluster > room) {
      const double free = room - occupied;
      if (free <= 0.0) return std::nullopt;
      const double scale = free / (cluster - occupied);
      for (double& g : inner) g *= scale;
      cluster = room;
    }
    const double centre = target_x + uniform(rng, -0.1, 0.1) * w / 0.8;
    double left = std::clamp(centre - cluster / 2, kEdgeMargin, w - kEdgeMargin - cluster);
    for (int i = 0; i < k; ++i) {
      SceneObject& o = row[i];
      o.id = "o" + std::to_string(next_id++);
      o.footprint.center = {left + o.footprint.half_w, y};
      left += o.footprint.width() + (i + 1 < k ? inner[i] : 0.0);
      scene.objects.push_back(o);
    }
  }
  try {
    validate(scene);
    const Decomposition d = decompose(scene);
    const int expected_rows = static_cast<int>(std::count_if(
        opt.objects_per_row.begin(), opt.objects_per_row.end(), [](int k) { return k > 0; }));
    if (static_cast<int>(d.rows.size()) != expected_rows) return std::nullopt;
    // The target must sit beyond the last row.
    if (!d.rows.empty() && scene.target.footprint.lo_y() <= d.rows.back().y_hi) {
      return std::nullopt;
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return scene;
}

}  // namespace

Scene generate_scene(std::mt19937_64& rng, const SceneGenOptions& options) {
  if (!options.boxes && !options.cylinders) {
    throw Error(ErrorCode::kSchemaError, "no object shapes enabled");
  }
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    if (auto scene = try_generate(rng, options)) return *scene;
  }
  throw Error(ErrorCode::kUnplaceableScene,
              "no valid scene after " + std::to_string(options.max_attempts) + " attempts");
}

Scene canonical_scene(std::mt19937_64& rng, double narrow_probability) {
  SceneGenOptions opt;
  opt.narrow_probability = narrow_probability;
  return generate_scene(rng, opt);
}

std::vector<Scene> generalisation_one(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Scene> out;
  for (int i = 0; i < n; ++i) {
    SceneGenOptions opt;
    opt.table_w = uniform(rng, 0.7, 0.95);
    opt.table_h = uniform(rng, 0.42, 0.52);
    opt.size_scale = uniform(rng, 0.8, 1.2);
    out.push_back(generate_scene(rng, opt));
  }
  return out;
}

std::vector<Scene> generalisation_two(int n, int n_objects, std::uint64_t seed) {
  if (n_objects < 2) throw Error(ErrorCode::kSchemaError, "need at least two objects");
  std::mt19937_64 rng(seed);
  std::vector<Scene> out;
  for (int i = 0; i < n; ++i) {
    SceneGenOptions opt;
    opt.cylinders = true;
    opt.aligned = false;
    opt.narrow_probability = 0.5;
    const int fewer = n_objects / 2;
    opt.objects_per_row = coin(rng, 0.5) ? std::vector<int>{fewer, n_objects - fewer}
                                         : std::vector<int>{n_objects - fewer, fewer};
    out.push_back(generate_scene(rng, opt));
  }
  return out;
}

}  // namespace hlp
