#ifndef HLP_SVG_H_
#define HLP_SVG_H_

#include <string>

#include "hlp/planner.h"
#include "hlp/scene.h"

namespace hlp {

struct RenderOptions {
  double pixels_per_meter = 800.0;
  double margin = 0.1;  // m around the table
  bool show_gaps = true;
  bool show_arm = true;
};

// Top view of the table. Counted elements carry one of the classes "obj"
// (obstacles and the target), "wall", "kp" (keypoints) and "seg" (path
// segments); gaps, rows and arm poses are drawn as uncounted annotations.
std::string render_svg(const Scene& scene, const Plan* plan = nullptr,
                       const RenderOptions& options = {});

// objects + target + 4 walls + keypoints + (keypoints - 1) segments.
int counted_element_count(const Scene& scene, const Plan* plan);

}  // namespace hlp

#endif  // HLP_SVG_H_
