#ifndef HLP_SCENE_H_
#define HLP_SCENE_H_

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hlp/geometry.h"

namespace hlp {

enum class Shape { kBox, kCylinder };

std::string_view to_string(Shape shape);
Shape shape_from_string(std::string_view name);

struct SceneObject {
  std::string id;
  Rect footprint;
  Shape shape = Shape::kBox;
  bool movable = true;
};

inline constexpr std::string_view kTargetId = "target";

// Canonical frame: origin at the table's front-left corner, +y towards the
// back (the target side), +x to the right.
struct Table {
  double width = 0.0;
  double height = 0.0;

  Rect rect() const { return Rect::from_bounds(0.0, 0.0, width, height); }
  double diagonal() const;
  double area() const { return width * height; }
};

struct Scene {
  Point2 start;
  SceneObject target;
  std::vector<SceneObject> objects;
  Table table;

  const SceneObject* find(std::string_view id) const;
  // Scene with the named object moved to a new centre. Throws when the id is
  // unknown.
  Scene with_object_at(std::string_view id, Point2 center) const;
};

// Start must lie within this distance of the front edge.
inline constexpr double kStartBand = 0.05;
inline constexpr double kWallThickness = 0.05;

// Throws kSchemaError, kOverlapError or kOutOfBounds.
void validate(const Scene& scene);

Scene load_scene(const nlohmann::json& document);
nlohmann::json to_json(const Scene& scene);
Scene load_scene_file(const std::filesystem::path& path);
void save_scene_file(const Scene& scene, const std::filesystem::path& path);

// Left, right, front (bottom) and back (top) walls just outside the table.
std::array<Rect, 4> walls(const Table& table);

// Obstacle footprints followed by the four walls (N + 4 rects). The target is
// the goal, not an obstacle, and is not included.
std::vector<Rect> occupied_space(const Scene& scene);

// Footprints of the movable obstacles, optionally skipping some ids.
std::vector<Rect> obstacle_footprints(
    const Scene& scene, std::span<const std::string> skip_ids = {});

struct Row {
  int index = 0;
  std::vector<std::string> member_ids;  // ordered by x
  double y_lo = 0.0;
  double y_hi = 0.0;

  double depth() const { return y_hi - y_lo; }
  double y_mid() const { return 0.5 * (y_lo + y_hi); }
};

struct Gap {
  int row_index = 0;
  int ordinal = 0;  // position within the row, left to right
  std::string left_neighbor;   // object id or "wall:left"
  std::string right_neighbor;  // object id or "wall:right"
  Point2 center;
  double width = 0.0;
  double diagonal = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;

  std::string id() const;
  Rect rect() const { return Rect::from_bounds(x_lo, y_lo, x_hi, y_hi); }
};

std::string gap_id(int row_index, int ordinal);

struct RowThresholds {
  double join = 0.0;  // single-linkage distance on centre y
  double band = 0.0;  // maximum allowed centre-y span of a row
};

// 1.5x and 2x the median obstacle depth.
RowThresholds row_thresholds(const Scene& scene);

// Clusters the movable obstacles into rows ordered from the start side.
// Throws kDegenerateRows when a cluster spans more than the band threshold.
std::vector<Row> detect_rows(const Scene& scene);

std::vector<Gap> extract_gaps(const Scene& scene, const std::vector<Row>& rows);

struct Decomposition {
  std::vector<Row> rows;
  std::vector<Gap> gaps;

  std::vector<const Gap*> gaps_in_row(int row_index) const;
  const Gap* find_gap(std::string_view id) const;
  // Row index of an obstacle, or -1.
  int row_of(std::string_view object_id) const;
};

Decomposition decompose(const Scene& scene);

// The eight neighbourhood classes, in canonical order.
enum class Direction { kFF = 0, kFL, kLL, kBL, kBB, kBR, kRR, kFR };
inline constexpr int kNumDirections = 8;
inline constexpr std::array<Direction, kNumDirections> kAllDirections = {
    Direction::kFF, Direction::kFL, Direction::kLL, Direction::kBL,
    Direction::kBB, Direction::kBR, Direction::kRR, Direction::kFR};

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view name);
int index_of(Direction d);

// Unit-grid offset of a direction: FF = (0, 1), LL = (-1, 0), FL = (-1, 1).
Point2 direction_offset(Direction d);

// Nearest of the eight classes to the vector (v.x / scale_x, v.y / scale_y).
// Throws kCoincidentPoints for a zero vector.
Direction quantize_direction(Point2 v, double scale_x = 1.0,
                             double scale_y = 1.0);

struct DirectionBlocks {
  std::array<Rect, kNumDirections> blocks;
  std::array<double, kNumDirections> free_area{};

  double total_free() const;
  double total_area() const;
};

inline constexpr double kDefaultAlpha = 1.0;

// Eight blocks around the footprint, each side alpha times the footprint
// extent. Free area counts only table surface not covered by another object.
DirectionBlocks direction_blocks(const SceneObject& obj, const Scene& scene,
                                 double alpha = kDefaultAlpha,
                                 int n_lines = kDefaultSamplingLines);

}  // namespace hlp

#endif  // HLP_SCENE_H_
