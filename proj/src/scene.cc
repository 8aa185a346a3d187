#include "hlp/scene.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "hlp/error.h"

namespace hlp {

using nlohmann::json;

std::string_view to_string(Shape shape) {
  return shape == Shape::kBox ? "box" : "cylinder";
}

Shape shape_from_string(std::string_view name) {
  if (name == "box") return Shape::kBox;
  if (name == "cylinder") return Shape::kCylinder;
  throw Error(ErrorCode::kSchemaError, "unknown shape '" + std::string(name) + "'");
}

double Table::diagonal() const { return std::hypot(width, height); }

const SceneObject* Scene::find(std::string_view id) const {
  if (id == target.id) return &target;
  for (const SceneObject& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

Scene Scene::with_object_at(std::string_view id, Point2 center) const {
  Scene moved = *this;
  if (moved.target.id == id) {
    moved.target.footprint.center = center;
    return moved;
  }
  for (SceneObject& o : moved.objects) {
    if (o.id == id) {
      o.footprint.center = center;
      return moved;
    }
  }
  throw Error(ErrorCode::kSchemaError, "no object '" + std::string(id) + "'");
}

namespace {

constexpr double kBoundsSlack = 1e-9;

bool inside_table(const Rect& r, const Table& t) {
  return r.lo_x() >= -kBoundsSlack && r.lo_y() >= -kBoundsSlack &&
         r.hi_x() <= t.width + kBoundsSlack &&
         r.hi_y() <= t.height + kBoundsSlack;
}

}  // namespace

void validate(const Scene& scene) {
  const Table& t = scene.table;
  if (!(t.width > 0.0) || !(t.height > 0.0) || !std::isfinite(t.width) ||
      !std::isfinite(t.height)) {
    throw Error(ErrorCode::kSchemaError, "table dimensions must be positive");
  }
  if (!is_finite(scene.start)) {
    throw Error(ErrorCode::kSchemaError, "start is not finite");
  }
  if (scene.start.x < 0.0 || scene.start.x > t.width ||
      std::abs(scene.start.y) > kStartBand) {
    throw Error(ErrorCode::kOutOfBounds, "start is not on the front edge band");
  }
  std::vector<const SceneObject*> all{&scene.target};
  for (const SceneObject& o : scene.objects) all.push_back(&o);
  std::set<std::string> ids;
  for (const SceneObject* o : all) {
    if (o->id.empty()) throw Error(ErrorCode::kSchemaError, "empty object id");
    if (!ids.insert(o->id).second) {
      throw Error(ErrorCode::kSchemaError, "duplicate object id '" + o->id + "'");
    }
    if (!o->footprint.valid()) {
      throw Error(ErrorCode::kSchemaError, "object '" + o->id + "' has an invalid footprint");
    }
    if (!inside_table(o->footprint, t)) {
      throw Error(ErrorCode::kOutOfBounds, "object '" + o->id + "' leaves the table");
    }
  }
  if (scene.target.id != kTargetId) {
    throw Error(ErrorCode::kSchemaError, "target id must be 'target'");
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (overlap_area(all[i]->footprint, all[j]->footprint) > 1e-12) {
        throw Error(ErrorCode::kOverlapError,
                    "objects '" + all[i]->id + "' and '" + all[j]->id + "' overlap");
      }
    }
  }
}

namespace {

template <typename T>
T field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(ErrorCode::kSchemaError, std::string("missing field '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("field '") + key + "': " + e.what());
  }
}

Point2 point_field(const json& doc, const char* key) {
  const auto v = field<std::vector<double>>(doc, key);
  if (v.size() != 2) {
    throw Error(ErrorCode::kSchemaError, std::string("field '") + key + "' must be [x, y]");
  }
  return {v[0], v[1]};
}

SceneObject object_from_json(const json& doc, std::string id) {
  SceneObject o;
  o.id = std::move(id);
  o.footprint = {point_field(doc, "pos"), field<double>(doc, "half_w"),
                 field<double>(doc, "half_h")};
  if (doc.contains("shape")) o.shape = shape_from_string(field<std::string>(doc, "shape"));
  if (doc.contains("movable")) o.movable = field<bool>(doc, "movable");
  return o;
}

json object_to_json(const SceneObject& o, bool with_id) {
  json j = {{"pos", {o.footprint.center.x, o.footprint.center.y}},
            {"half_w", o.footprint.half_w},
            {"half_h", o.footprint.half_h},
            {"shape", to_string(o.shape)},
            {"movable", o.movable}};
  if (with_id) j["id"] = o.id;
  return j;
}

}  // namespace

Scene load_scene(const json& document) {
  if (!document.is_object()) {
    throw Error(ErrorCode::kSchemaError, "scene document must be an object");
  }
  Scene scene;
  const json table = field<json>(document, "table");
  scene.table = {field<double>(table, "w"), field<double>(table, "h")};
  scene.start = point_field(document, "start");
  scene.target = object_from_json(field<json>(document, "target"), std::string(kTargetId));
  if (!document.at("target").contains("shape")) scene.target.shape = Shape::kCylinder;
  const json objects = field<json>(document, "objects");
  if (!objects.is_array()) throw Error(ErrorCode::kSchemaError, "'objects' must be an array");
  for (const json& o : objects) {
    scene.objects.push_back(object_from_json(o, field<std::string>(o, "id")));
  }
  validate(scene);
  return scene;
}

json to_json(const Scene& scene) {
  json objects = json::array();
  for (const SceneObject& o : scene.objects) objects.push_back(object_to_json(o, true));
  return {{"table", {{"w", scene.table.width}, {"h", scene.table.height}}},
          {"start", {scene.start.x, scene.start.y}},
          {"target", object_to_json(scene.target, false)},
          {"objects", objects}};
}

Scene load_scene_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, path.string() + ": " + e.what());
  }
  return load_scene(doc);
}

void save_scene_file(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << to_json(scene).dump(2) << "\n";
}

std::array<Rect, 4> walls(const Table& t) {
  const double k = kWallThickness;
  return {Rect::from_bounds(-k, 0.0, 0.0, t.height),
          Rect::from_bounds(t.width, 0.0, t.width + k, t.height),
          Rect::from_bounds(-k, -k, t.width + k, 0.0),
          Rect::from_bounds(-k, t.height, t.width + k, t.height + k)};
}

std::vector<Rect> occupied_space(const Scene& scene) {
  std::vector<Rect> out;
  out.reserve(scene.objects.size() + 4);
  for (const SceneObject& o : scene.objects) out.push_back(o.footprint);
  for (const Rect& w : walls(scene.table)) out.push_back(w);
  return out;
}

std::vector<Rect> obstacle_footprints(const Scene& scene,
                                      std::span<const std::string> skip_ids) {
  std::vector<Rect> out;
  for (const SceneObject& o : scene.objects) {
    if (std::find(skip_ids.begin(), skip_ids.end(), o.id) != skip_ids.end()) continue;
    out.push_back(o.footprint);
  }
  return out;
}

std::string gap_id(int row_index, int ordinal) {
  return "g" + std::to_string(row_index) + "." + std::to_string(ordinal);
}

std::string Gap::id() const { return gap_id(row_index, ordinal); }

RowThresholds row_thresholds(const Scene& scene) {
  std::vector<double> depths;
  for (const SceneObject& o : scene.objects) depths.push_back(o.footprint.height());
  if (depths.empty()) return {};
  std::sort(depths.begin(), depths.end());
  const std::size_t n = depths.size();
  const double median =
      n % 2 ? depths[n / 2] : 0.5 * (depths[n / 2 - 1] + depths[n / 2]);
  return {1.5 * median, 2.0 * median};
}

std::vector<Row> detect_rows(const Scene& scene) {
  std::vector<const SceneObject*> order;
  for (const SceneObject& o : scene.objects) order.push_back(&o);
  if (order.empty()) return {};
  std::sort(order.begin(), order.end(), [](const SceneObject* a, const SceneObject* b) {
    const Point2 pa = a->footprint.center, pb = b->footprint.center;
    if (pa.y != pb.y) return pa.y < pb.y;
    if (pa.x != pb.x) return pa.x < pb.x;
    return a->id < b->id;
  });
  const RowThresholds th = row_thresholds(scene);

  std::vector<std::vector<const SceneObject*>> clusters{{order.front()}};
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double step = order[i]->footprint.center.y - order[i - 1]->footprint.center.y;
    if (step > th.join) clusters.emplace_back();
    clusters.back().push_back(order[i]);
  }

  std::vector<Row> rows;
  for (auto& members : clusters) {
    const double span = members.back()->footprint.center.y - members.front()->footprint.center.y;
    if (span > th.band) {
      throw Error(ErrorCode::kDegenerateRows,
                  "row starting at '" + members.front()->id + "' spans " +
                      std::to_string(span) + " m in y");
    }
    std::sort(members.begin(), members.end(), [](const SceneObject* a, const SceneObject* b) {
      if (a->footprint.center.x != b->footprint.center.x) {
        return a->footprint.center.x < b->footprint.center.x;
      }
      return a->id < b->id;
    });
    Row row;
    row.index = static_cast<int>(rows.size());
    row.y_lo = members.front()->footprint.lo_y();
    row.y_hi = members.front()->footprint.hi_y();
    for (const SceneObject* o : members) {
      row.member_ids.push_back(o->id);
      row.y_lo = std::min(row.y_lo, o->footprint.lo_y());
      row.y_hi = std::max(row.y_hi, o->footprint.hi_y());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Gap> extract_gaps(const Scene& scene, const std::vector<Row>& rows) {
  constexpr double kMinWidth = 1e-9;
  std::vector<Gap> gaps;
  for (const Row& row : rows) {
    std::string left_id = "wall:left";
    double cursor = 0.0;
    int ordinal = 0;
    auto emit = [&](double hi, const std::string& right_id) {
      if (hi - cursor > kMinWidth) {
        Gap g;
        g.row_index = row.index;
        g.ordinal = ordinal++;
        g.left_neighbor = left_id;
        g.right_neighbor = right_id;
        g.x_lo = cursor;
        g.x_hi = hi;
        g.y_lo = row.y_lo;
        g.y_hi = row.y_hi;
        g.width = hi - cursor;
        g.center = {0.5 * (cursor + hi), row.y_mid()};
        g.diagonal = std::hypot(g.width, row.depth());
        gaps.push_back(std::move(g));
      }
    };
    for (const std::string& id : row.member_ids) {
      const Rect& fp = scene.find(id)->footprint;
      emit(fp.lo_x(), id);
      cursor = std::max(cursor, fp.hi_x());
      left_id = id;
    }
    emit(scene.table.width, "wall:right");
  }
  return gaps;
}

std::vector<const Gap*> Decomposition::gaps_in_row(int row_index) const {
  std::vector<const Gap*> out;
  for (const Gap& g : gaps) {
    if (g.row_index == row_index) out.push_back(&g);
  }
  return out;
}

const Gap* Decomposition::find_gap(std::string_view id) const {
  for (const Gap& g : gaps) {
    if (g.id() == id) return &g;
  }
  return nullptr;
}

int Decomposition::row_of(std::string_view object_id) const {
  for (const Row& r : rows) {
    if (std::find(r.member_ids.begin(), r.member_ids.end(), object_id) != r.member_ids.end()) {
      return r.index;
    }
  }
  return -1;
}

Decomposition decompose(const Scene& scene) {
  Decomposition d;
  d.rows = detect_rows(scene);
  d.gaps = extract_gaps(scene, d.rows);
  return d;
}

std::string_view to_string(Direction d) {
  static constexpr std::array<std::string_view, kNumDirections> kNames = {
      "FF", "FL", "LL", "BL", "BB", "BR", "RR", "FR"};
  return kNames[index_of(d)];
}

Direction direction_from_string(std::string_view name) {
  for (Direction d : kAllDirections) {
    if (to_string(d) == name) return d;
  }
  throw Error(ErrorCode::kSchemaError, "unknown direction '" + std::string(name) + "'");
}

int index_of(Direction d) { return static_cast<int>(d); }

Point2 direction_offset(Direction d) {
  static constexpr std::array<Point2, kNumDirections> kOffsets = {{
      {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}}};
  return kOffsets[index_of(d)];
}

Direction quantize_direction(Point2 v, double scale_x, double scale_y) {
  const Point2 scaled{v.x / scale_x, v.y / scale_y};
  const double angle = orientation({0.0, 0.0}, scaled);
  const long sector = std::lround(angle / (std::numbers::pi / 4.0));
  switch (sector) {
    case 0: return Direction::kFF;
    case 1: return Direction::kFR;
    case 2: return Direction::kRR;
    case 3: return Direction::kBR;
    case -1: return Direction::kFL;
    case -2: return Direction::kLL;
    case -3: return Direction::kBL;
    default: return Direction::kBB;
  }
}

double DirectionBlocks::total_free() const {
  double s = 0.0;
  for (double a : free_area) s += a;
  return s;
}

double DirectionBlocks::total_area() const {
  double s = 0.0;
  for (const Rect& b : blocks) s += b.area();
  return s;
}

DirectionBlocks direction_blocks(const SceneObject& obj, const Scene& scene,
                                 double alpha, int n_lines) {
  const Rect& fp = obj.footprint;
  const double grow_w = alpha * fp.width();
  const double grow_h = alpha * fp.height();
  std::vector<Rect> others;
  for (const SceneObject& o : scene.objects) {
    if (o.id != obj.id) others.push_back(o.footprint);
  }
  if (scene.target.id != obj.id) others.push_back(scene.target.footprint);
  const Rect table = scene.table.rect();

  DirectionBlocks out;
  for (Direction d : kAllDirections) {
    const Point2 u = direction_offset(d);
    const double lo_x = u.x < 0 ? fp.lo_x() - grow_w : (u.x > 0 ? fp.hi_x() : fp.lo_x());
    const double hi_x = u.x < 0 ? fp.lo_x() : (u.x > 0 ? fp.hi_x() + grow_w : fp.hi_x());
    const double lo_y = u.y < 0 ? fp.lo_y() - grow_h : (u.y > 0 ? fp.hi_y() : fp.lo_y());
    const double hi_y = u.y < 0 ? fp.lo_y() : (u.y > 0 ? fp.hi_y() + grow_h : fp.hi_y());
    const Rect block = Rect::from_bounds(lo_x, lo_y, hi_x, hi_y);
    const int i = index_of(d);
    out.blocks[i] = block;
    // Everything off the table counts as occupied (walls bound the surface).
    const auto on_table = intersect(block, table);
    if (!on_table) {
      out.free_area[i] = 0.0;
      continue;
    }
    const double covered = sampled_overlap_area(*on_table, others, n_lines);
    out.free_area[i] = std::clamp(on_table->area() - covered, 0.0, block.area());
  }
  return out;
}

}  // namespace hlp
