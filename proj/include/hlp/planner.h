#ifndef HLP_PLANNER_H_
#define HLP_PLANNER_H_

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlp/arm.h"
#include "hlp/demos.h"
#include "hlp/features.h"
#include "hlp/learners.h"
#include "hlp/scene.h"

namespace hlp {

struct ModelSet {
  KernelModel gap;        // binary, arity 5
  KernelModel object;     // binary, arity 7
  KernelModel direction;  // multiclass8, arity 17
  KernelModel segment;    // binary, arity 5
  KernelModel arm;        // regressor2, arity 12

  // Throws kArity when a model has the wrong kind or arity.
  void check() const;
};

// Files gap.json, object.json, direction.json, segment.json, arm.json.
void save_models(const ModelSet& models, const std::filesystem::path& dir);
ModelSet load_models(const std::filesystem::path& dir);

struct PlannerConfig {
  int gaps_per_row = 2;
  int objects_per_row = 1;
  int segments = 3;  // <= 0 keeps every segment
  double alpha = kDefaultAlpha;
  int n_lines = kDefaultSamplingLines;
  double move_distance_factor = 1.5;
  ArmParams arm;
  // Rank segments by p_c alone, or by p_c times both element probabilities.
  bool joint_segment_score = false;

  static PlannerConfig exhaustive() {
    PlannerConfig c;
    c.gaps_per_row = 4;
    c.objects_per_row = 3;
    c.segments = 0;
    return c;
  }
};

struct ScoredElement {
  PlanElement element;
  double score = 0.0;
};

struct RowCandidates {
  int row = 0;
  std::vector<ScoredElement> gaps;
  std::vector<ScoredElement> objects;

  std::vector<ScoredElement> all() const;
};

// Top gaps and movable objects of a row by classifier probability, ties by
// id. Throws kNoCandidates when the row has neither.
RowCandidates select_row_candidates(const Row& row, const Scene& scene,
                                    const Decomposition& decomposition,
                                    const ModelSet& models, const PlannerConfig& cfg);

struct CandidateSegment {
  PlanElement e1;
  PlanElement e2;
  SegmentFeatures features;
  double score = 0.0;       // segment classifier probability
  double rank_score = 0.0;  // what segments are ordered by
  double c_zeta = 0.0;      // m^2, before normalisation
};

// Every pairing of the two rows' candidates, best segments first, truncated
// to cfg.segments.
std::vector<CandidateSegment> construct_segments(const RowCandidates& first,
                                                 const RowCandidates& second,
                                                 const Scene& scene,
                                                 const ModelSet& models,
                                                 const PlannerConfig& cfg);

struct Relocation {
  Direction direction = Direction::kFF;
  Point2 new_pos;
  std::array<double, kNumDirections> scores{};
};

// Highest-scoring direction whose target place is feasible in `current`
// (the scene with earlier relocations applied). Features are read from
// `scene`. Throws kBlockedRelocation when no direction is feasible.
Relocation predict_object_relocation(const SceneObject& obj, Direction approach,
                                     const Scene& scene, const Scene& current,
                                     const ModelSet& models, const PlannerConfig& cfg);

struct Keypoint {
  enum class Kind { kStart, kGap, kObject, kTarget };

  Kind kind = Kind::kStart;
  Point2 position;
  std::string element;
  int row = -1;
  Direction direction = Direction::kFF;
  std::optional<Point2> new_pos;
  ArmConfig config;
};

std::string_view to_string(Keypoint::Kind kind);

// A complete candidate path, scored.
struct PathEvaluation {
  std::vector<PlanElement> elements;  // one per row
  std::vector<Keypoint> keypoints;    // start, elements, target
  bool feasible = false;
  std::string infeasible_reason;
  double rho_zeta = 0.0;
  int moves = 0;
  double classifier_score = 0.0;  // sum of segment probabilities
  Scene relocated;                // scene with predicted relocations applied
};

PathEvaluation evaluate_path(const Scene& scene, const std::vector<PlanElement>& elements,
                             const ModelSet& models, const PlannerConfig& cfg);

// Path order: lower rho, then fewer moves, then higher classifier score,
// then element ids.
bool better_path(const PathEvaluation& a, const PathEvaluation& b);

struct PlanTimings {
  double init_s = 0.0;   // decomposition, candidate and segment selection
  double total_s = 0.0;  // the whole plan call
};

struct Plan {
  std::vector<Keypoint> keypoints;
  double rho_zeta = 0.0;
  nlohmann::json decision_trace;
  PlanTimings timings;
  int candidate_paths = 0;

  std::vector<RowAction> actions() const;
  std::vector<Point2> points() const;
};

// Throws kNoFeasiblePlan when no candidate path survives, kNoCandidates when a
// row offers nothing to act on.
Plan plan(const Scene& scene, const ModelSet& models, const PlannerConfig& cfg = {});

// Keypoints, actions and trace. Timings are written as zero when masked.
nlohmann::json to_json(const Plan& plan, bool mask_timings = false);
// Row actions of a plan document.
std::vector<RowAction> plan_actions_from_json(const nlohmann::json& doc);

struct Similarity {
  double score = 0.0;          // s_HLP
  double action_match = 0.0;   // mean I(D_n)
  double element_match = 0.0;  // mean I(D_n) I(E_n)
};

// Throws kRowMismatch when the row counts differ.
Similarity similarity(const std::vector<RowAction>& planned,
                      const std::vector<RowAction>& reference);
Similarity similarity(const Plan& plan, const std::vector<StateActionPair>& reference);

}  // namespace hlp

#endif  // HLP_PLANNER_H_
