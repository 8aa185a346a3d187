#ifndef HLP_SCENE_GEN_H_
#define HLP_SCENE_GEN_H_

#include <cstdint>
#include <random>
#include <vector>

#include "hlp/scene.h"

namespace hlp {

struct SceneGenOptions {
  double table_w = 0.8;
  double table_h = 0.45;
  std::vector<int> objects_per_row = {3, 3};
  bool boxes = true;
  bool cylinders = false;
  // Start and target share the same x when aligned.
  bool aligned = true;
  // Chance that an inner gap is drawn narrow (below the hand clearance).
  double narrow_probability = 0.6;
  // Object half extents, as fractions of the canonical sizes.
  double size_scale = 1.0;
  int max_attempts = 1000;
};

// Rows of objects between the start edge and the target. Throws
// kUnplaceableScene when no valid scene is found within max_attempts.
Scene generate_scene(std::mt19937_64& rng, const SceneGenOptions& options);

// The demonstration layout: two rows of three boxes, aligned start/target.
Scene canonical_scene(std::mt19937_64& rng, double narrow_probability = 0.6);

// Two-row scenes with varied table and object dimensions.
std::vector<Scene> generalisation_one(int n, std::uint64_t seed);

// Two-row scenes of boxes and cylinders with n_objects split across the rows
// and start/target not aligned.
std::vector<Scene> generalisation_two(int n, int n_objects, std::uint64_t seed);

}  // namespace hlp

#endif  // HLP_SCENE_GEN_H_
