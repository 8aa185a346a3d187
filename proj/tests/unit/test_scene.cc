#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "hlp/error.h"
#include "hlp/scene.h"
#include "hlp/scene_gen.h"
#include "oracles.h"

using namespace hlp;
using hlp::testing::random_canonical;
using hlp::testing::raster_area;
using hlp::testing::row_scene;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIo;
}

// Free table surface in a block: inside the table, outside every other object.
double raster_free(const Rect& block, const Scene& scene, const std::string& self) {
  std::vector<Rect> blocked;
  for (const SceneObject& o : scene.objects) {
    if (o.id != self) blocked.push_back(o.footprint);
  }
  if (self != scene.target.id) blocked.push_back(scene.target.footprint);
  for (const Rect& r : hlp::testing::off_table(scene.table)) blocked.push_back(r);
  return block.area() - raster_area(block, blocked);
}

}  // namespace

TEST_SUITE("scene") {

TEST_CASE("load canonical document") {
  const nlohmann::json doc = {
      {"table", {{"w", 0.8}, {"h", 0.45}}},
      {"start", {0.4, 0.0}},
      {"target", {{"pos", {0.4, 0.39}}, {"half_w", 0.033}, {"half_h", 0.033}}},
      {"objects",
       {{{"id", "a"}, {"pos", {0.15, 0.12}}, {"half_w", 0.03}, {"half_h", 0.03}},
        {{"id", "b"}, {"pos", {0.40, 0.12}}, {"half_w", 0.03}, {"half_h", 0.03}},
        {{"id", "c"}, {"pos", {0.65, 0.12}}, {"half_w", 0.03}, {"half_h", 0.03}},
        {{"id", "d"}, {"pos", {0.15, 0.26}}, {"half_w", 0.03}, {"half_h", 0.03}},
        {{"id", "e"}, {"pos", {0.40, 0.26}}, {"half_w", 0.03}, {"half_h", 0.03}},
        {{"id", "f"}, {"pos", {0.65, 0.26}}, {"half_w", 0.03}, {"half_h", 0.03}}}}};
  const Scene s = load_scene(doc);
  CHECK(s.objects.size() == 6);
  CHECK(s.target.shape == Shape::kCylinder);

  nlohmann::json bad = doc;
  bad["objects"][1]["pos"] = {0.15, 0.12};
  CHECK(code_of([&] { load_scene(bad); }) == ErrorCode::kOverlapError);
  bad = doc;
  bad["objects"][0]["pos"] = {0.79, 0.12};
  CHECK(code_of([&] { load_scene(bad); }) == ErrorCode::kOutOfBounds);
  bad = doc;
  bad.erase("table");
  CHECK(code_of([&] { load_scene(bad); }) == ErrorCode::kSchemaError);
}

TEST_CASE("scene json round trip on generated scenes") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Scene s = random_canonical(seed);
    const nlohmann::json doc = to_json(s);
    CHECK(to_json(load_scene(doc)) == doc);
    CHECK(load_scene(nlohmann::json::parse(doc.dump())).objects.size() == s.objects.size());
  }
}

TEST_CASE("occupied space") {
  const Scene six = random_canonical(3);
  CHECK(occupied_space(six).size() == 10);
  Scene empty = six;
  empty.objects.clear();
  CHECK(occupied_space(empty).size() == 4);
  const Rect closure = Rect::from_bounds(-1e-12, -1e-12, six.table.width + 1e-12,
                                         six.table.height + 1e-12);
  for (const Rect& r : occupied_space(six)) {
    CHECK(r.lo_x() <= closure.hi_x());
    CHECK(r.hi_x() >= closure.lo_x());
    CHECK(r.lo_y() <= closure.hi_y());
    CHECK(r.hi_y() >= closure.lo_y());
  }
}

TEST_CASE("walls bound the table") {
  const Table t{0.8, 0.45};
  const auto w = walls(t);
  CHECK(w[0].hi_x() == 0.0);
  CHECK(w[1].lo_x() == t.width);
  CHECK(w[2].hi_y() == 0.0);
  CHECK(w[3].lo_y() == doctest::Approx(t.height));
}

TEST_CASE("detect rows") {
  const Scene s = random_canonical(5);
  const auto rows = detect_rows(s);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].member_ids.size() == 3);
  CHECK(rows[1].member_ids.size() == 3);
  CHECK(rows[0].y_mid() < rows[1].y_mid());

  const Scene single = row_scene({{0.4}}, {0.2});
  const auto one = detect_rows(single);
  REQUIRE(one.size() == 1);
  CHECK(one[0].member_ids.size() == 1);
}

TEST_CASE("detect rows matches known-k clustering") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> jitter(-0.004, 0.004);
  for (int trial = 0; trial < 30; ++trial) {
    const std::vector<double> levels = {0.09, 0.20, 0.31};
    Scene s = row_scene({}, {}, 0.02, 0.9, 0.5);
    std::map<std::string, int> level_of;
    int n = 0;
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) {
        const std::string id = "o" + std::to_string(n++);
        s.objects.push_back({id, {{0.15 + 0.3 * k + jitter(rng), levels[r] + jitter(rng)}, 0.02, 0.02},
                             Shape::kBox, true});
        level_of[id] = r;
      }
    }
    // k-means with k = 3 on centre y, seeded at the sorted extremes and median.
    std::vector<double> c = levels;
    for (int it = 0; it < 20; ++it) {
      std::array<double, 3> sum{}, cnt{};
      for (const SceneObject& o : s.objects) {
        int best = 0;
        for (int k = 1; k < 3; ++k) {
          if (std::abs(o.footprint.center.y - c[k]) < std::abs(o.footprint.center.y - c[best])) best = k;
        }
        sum[best] += o.footprint.center.y;
        cnt[best] += 1;
      }
      for (int k = 0; k < 3; ++k) if (cnt[k] > 0) c[k] = sum[k] / cnt[k];
    }
    const auto rows = detect_rows(s);
    REQUIRE(rows.size() == 3);
    for (const Row& row : rows) {
      for (const std::string& id : row.member_ids) {
        const double y = s.find(id)->footprint.center.y;
        int best = 0;
        for (int k = 1; k < 3; ++k) if (std::abs(y - c[k]) < std::abs(y - c[best])) best = k;
        CHECK(best == row.index);
        CHECK(y >= row.y_lo - 1e-12);
        CHECK(y <= row.y_hi + 1e-12);
      }
    }
  }
}

TEST_CASE("degenerate rows") {
  // A chain of objects stepping up in y links into one over-tall cluster.
  Scene s = row_scene({}, {}, 0.02, 0.9, 0.6);
  for (int i = 0; i < 6; ++i) {
    s.objects.push_back({"o" + std::to_string(i), {{0.1 + 0.12 * i, 0.08 + 0.05 * i}, 0.02, 0.02},
                         Shape::kBox, true});
  }
  CHECK(code_of([&] { detect_rows(s); }) == ErrorCode::kDegenerateRows);
}

TEST_CASE("gaps") {
  const Scene s = random_canonical(11);
  const auto rows = detect_rows(s);
  const auto gaps = extract_gaps(s, rows);
  CHECK(gaps.size() == 8);
  const Scene one = row_scene({{0.4}}, {0.2});
  const auto g1 = extract_gaps(one, detect_rows(one));
  REQUIRE(g1.size() == 2);
  CHECK(g1[0].width == doctest::Approx(g1[1].width).epsilon(1e-12));
  CHECK(g1[0].left_neighbor == "wall:left");
  CHECK(g1[1].right_neighbor == "wall:right");
  for (const Gap& g : gaps) {
    CHECK(g.diagonal == doctest::Approx(std::hypot(g.width, g.y_hi - g.y_lo)).epsilon(1e-12));
    CHECK(g.width > 0.0);
  }
}

TEST_CASE("gaps partition each row interval") {
  for (std::uint64_t seed = 100; seed < 220; ++seed) {
    const Scene s = random_canonical(seed);
    const Decomposition d = decompose(s);
    for (const Row& row : d.rows) {
      double total = 0.0;
      for (const Gap* g : d.gaps_in_row(row.index)) total += g->width;
      for (const std::string& id : row.member_ids) total += s.find(id)->footprint.width();
      CHECK(total == doctest::Approx(s.table.width).epsilon(1e-9));
      const auto gs = d.gaps_in_row(row.index);
      CHECK(gs.size() == row.member_ids.size() + 1);
      for (std::size_t i = 1; i < gs.size(); ++i) CHECK(gs[i - 1]->x_hi <= gs[i]->x_lo + 1e-12);
      for (const Gap* g : gs) {
        for (const SceneObject& o : s.objects) {
          CHECK(overlap_area(g->rect(), o.footprint) == doctest::Approx(0.0).epsilon(1e-12));
        }
      }
    }
    std::set<std::string> seen;
    std::size_t members = 0;
    for (const Row& row : d.rows) {
      members += row.member_ids.size();
      seen.insert(row.member_ids.begin(), row.member_ids.end());
    }
    CHECK(members == s.objects.size());
    CHECK(seen.size() == s.objects.size());
  }
}

TEST_CASE("direction blocks") {
  Scene s = row_scene({{0.4}}, {0.2});
  s.target.footprint.center = {0.1, 0.38};
  const DirectionBlocks iso = direction_blocks(s.objects[0], s);
  for (int k = 0; k < kNumDirections; ++k) {
    CHECK(iso.free_area[k] == doctest::Approx(iso.blocks[k].area()).epsilon(0.02));
    for (int j = k + 1; j < kNumDirections; ++j) {
      CHECK(overlap_area(iso.blocks[k], iso.blocks[j]) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
  double sum = 0.0;
  for (double f : iso.free_area) sum += f;
  CHECK(sum == iso.total_free());

  Scene wall = row_scene({{0.8 - 0.03}}, {0.2});
  wall.target.footprint.center = {0.1, 0.38};
  const DirectionBlocks w = direction_blocks(wall.objects[0], wall);
  for (Direction d : {Direction::kRR, Direction::kFR, Direction::kBR}) {
    CHECK(w.free_area[index_of(d)] == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("direction blocks against rasterization") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.06, 0.1);
  for (int i = 0; i < 40; ++i) {
    const double gap = u(rng) - 0.05;
    Scene s = row_scene({{0.3, 0.36 + gap}}, {0.2});
    const DirectionBlocks b = direction_blocks(s.objects[0], s);
    for (int k = 0; k < kNumDirections; ++k) {
      const double oracle = raster_free(b.blocks[k], s, s.objects[0].id);
      CHECK(std::abs(b.free_area[k] - oracle) <= 0.05 * b.blocks[k].area());
    }
  }
}

TEST_CASE("direction blocks are translation equivariant") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> pos(0.3, 0.7), shift(-0.2, 0.2);
  for (int i = 0; i < 100; ++i) {
    Scene s = row_scene({{pos(rng)}}, {0.3}, 0.03, 1.0, 0.6);
    s.objects.push_back({"n", {{s.objects[0].footprint.center.x + 0.07, 0.32}, 0.02, 0.02},
                         Shape::kBox, true});
    s.target.footprint.center = {0.05, 0.55};
    const Point2 d{shift(rng), 0.0};
    Scene t = s;
    for (SceneObject& o : t.objects) o.footprint.center = o.footprint.center + d;
    const DirectionBlocks a = direction_blocks(s.objects[0], s);
    const DirectionBlocks b = direction_blocks(t.objects[0], t);
    for (int k = 0; k < kNumDirections; ++k) {
      CHECK(b.blocks[k].center.x == doctest::Approx(a.blocks[k].center.x + d.x).epsilon(1e-12));
      CHECK(b.free_area[k] == doctest::Approx(a.free_area[k]).epsilon(0.02));
    }
  }
}

TEST_CASE("direction quantization") {
  CHECK(quantize_direction({0, 1}) == Direction::kFF);
  CHECK(quantize_direction({-1, 0}) == Direction::kLL);
  CHECK(quantize_direction({1, -1}) == Direction::kBR);
  for (Direction d : kAllDirections) {
    CHECK(quantize_direction(direction_offset(d)) == d);
    CHECK(direction_from_string(to_string(d)) == d);
  }
  CHECK_THROWS_AS(quantize_direction({0, 0}), Error);
}

TEST_CASE("generated scenes validate") {
  for (const Scene& s : generalisation_two(100, 9, 4)) CHECK_NOTHROW(validate(s));
  for (const Scene& s : generalisation_one(50, 4)) CHECK_NOTHROW(validate(s));
  int boxes = 0, cylinders = 0;
  for (const Scene& s : generalisation_two(100, 7, 5)) {
    for (const SceneObject& o : s.objects) (o.shape == Shape::kBox ? boxes : cylinders)++;
  }
  CHECK(boxes > 0);
  CHECK(cylinders > 0);
}

}
