#ifndef HLP_DEMOS_H_
#define HLP_DEMOS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlp/arm.h"
#include "hlp/features.h"
#include "hlp/learners.h"
#include "hlp/scene.h"

namespace hlp {

inline constexpr double kSampleRate = 90.0;

struct TrajectorySample {
  double t = 0.0;
  Point2 hand;
  Point2 elbow;
  Point2 upper_arm;  // tracked point nearest the shoulder
};

struct TrackPose {
  double t = 0.0;
  Point2 center;
};

// Sparse pose history: a new pose is stored only when the object moves.
struct ObjectTrack {
  std::string id;
  std::vector<TrackPose> poses;

  Point2 at(double t) const;
  Point2 initial() const { return poses.front().center; }
  Point2 final() const { return poses.back().center; }
};

enum class ActionKind { kGap, kObject };

std::string_view to_string(ActionKind kind);

// What happened at one row: pass through a gap, or move an object in a
// direction.
struct RowAction {
  int row = 0;
  ActionKind kind = ActionKind::kGap;
  std::string element;
  Direction direction = Direction::kFF;
  std::optional<Point2> new_pos;
  // Interval during which the hand may touch the moved object.
  double contact_begin = 0.0;
  double contact_end = 0.0;

  friend bool operator==(const RowAction& a, const RowAction& b) {
    return a.row == b.row && a.kind == b.kind && a.element == b.element &&
           (a.kind == ActionKind::kGap || a.direction == b.direction);
  }
};

struct Demonstration {
  std::string source;  // demonstrator ("participant") name
  std::string trial;
  Scene scene;
  std::vector<TrajectorySample> trajectory;
  std::vector<ObjectTrack> object_tracks;
  std::vector<RowAction> ground_truth;

  const ObjectTrack* track(std::string_view id) const;
};

// Throws kSchemaError when the trajectory is empty, times do not increase, or
// a movable object has no track.
void validate(const Demonstration& demo);

struct StateActionPair {
  RowAction action;
  Point2 keypoint;             // hand position at the crossing or pick
  double time = 0.0;
  ArmConfig config;            // recovered from the tracked joints
  Direction approach = Direction::kFF;
  bool ambiguous = false;      // an object moved and a gap was crossed
};

struct SegmentationOptions {
  // Minimum displacement, in object half-widths, that counts as a move.
  double move_threshold = 1.0;
  double approach_window = 0.2;  // seconds
};

// One action per row of the initial scene. Throws kNoCrossing when the hand
// never reaches a row without moving one of its objects.
std::vector<StateActionPair> segment_demonstration(
    const Demonstration& demo, const SegmentationOptions& options = {});

// Keypoints of a demonstration: start, one per row, then the final hand
// position, with the arm configuration at each.
struct KeypointTrace {
  std::vector<Point2> points;
  std::vector<ArmConfig> configs;
};

KeypointTrace keypoint_trace(const Demonstration& demo,
                             const std::vector<StateActionPair>& pairs);

struct TrainingBundle {
  LabeledSet gap_set;
  LabeledSet object_set;
  LabeledSet direction_set;
  LabeledSet segment_set;
  LabeledSet arm_set;
};

struct BundleOptions {
  double alpha = kDefaultAlpha;
  int n_lines = kDefaultSamplingLines;
  ArmParams arm;
  SegmentationOptions segmentation;
};

// Throws kEmptyBundle when no demonstration yields a row decision.
TrainingBundle build_training_bundle(const std::vector<Demonstration>& demos,
                                     const BundleOptions& options = {});

// Scripted demonstrator. Each row, in order from the start, is crossed
// through the widest gap near the line to the target that the hand fits
// through (width at least `clearance`, within `corridor`), traded against its
// offset. When no gap qualifies, the movable object with the freest
// surroundings near that line is pushed to its freest feasible block. Each
// participant gets its own offset aversion drawn around offset_weight.
struct PolicyParams {
  double clearance = 0.09;     // narrowest gap the hand passes through, m
  double corridor = 0.2;       // max offset of a considered element from the target, m
  double offset_weight = 2.0;  // score lost per m of offset
  double participant_spread = 0.15;
  double noise = 0.005;        // score noise per choice
  double move_distance_factor = 1.5;
  double hand_speed = 0.4;     // m/s
  int participants = 10;
  double narrow_probability = 0.6;
};
std::vector<Demonstration> generate_synthetic_demos(int n, std::uint64_t seed,
                                                    const PolicyParams& params = {});

// Demonstration for a given scene and participant; the returned demo has its
// ground truth filled in. Returns nullopt when the policy finds no action for
// some row.
std::optional<Demonstration> demonstrate(const Scene& scene, int participant,
                                         std::uint64_t seed,
                                         const PolicyParams& params = {});

// New centre when moving an object one step in a direction:
// (1 + factor) half extents along each moved axis.
Point2 relocation_target(const SceneObject& obj, Direction d, double factor);

// Inside the table and clear of every other object and the target.
bool relocation_feasible(const Scene& scene, const SceneObject& obj, Point2 new_center);

nlohmann::json to_json(const Demonstration& demo);
Demonstration demonstration_from_json(const nlohmann::json& doc);
void save_demos_jsonl(const std::vector<Demonstration>& demos,
                      const std::filesystem::path& path);
std::vector<Demonstration> load_demos_jsonl(const std::filesystem::path& path);

// External layout: <root>/<participant>/<trial>.json, y-up 3D positions.
struct VrLoadReport {
  std::vector<Demonstration> demos;
  std::vector<std::pair<std::string, std::string>> skipped;  // file, reason
};

// Throws kIo when the root is unreadable and kLayout when it holds no
// participant directories with trial files.
VrLoadReport load_vr_dataset(const std::filesystem::path& root);
void write_vr_trial(const Demonstration& demo, const std::filesystem::path& root,
                    double height = 0.75);

}  // namespace hlp

#endif  // HLP_DEMOS_H_
