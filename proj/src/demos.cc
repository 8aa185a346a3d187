#include "hlp/demos.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "hlp/error.h"
#include "hlp/scene_gen.h"

namespace hlp {

using nlohmann::json;

Point2 ObjectTrack::at(double t) const {
  Point2 p = poses.front().center;
  for (const TrackPose& pose : poses) {
    if (pose.t > t) break;
    p = pose.center;
  }
  return p;
}

std::string_view to_string(ActionKind kind) {
  return kind == ActionKind::kGap ? "gap" : "object";
}

const ObjectTrack* Demonstration::track(std::string_view id) const {
  for (const ObjectTrack& tr : object_tracks) {
    if (tr.id == id) return &tr;
  }
  return nullptr;
}

void validate(const Demonstration& demo) {
  if (demo.trajectory.empty()) throw Error(ErrorCode::kSchemaError, "empty trajectory");
  for (std::size_t i = 1; i < demo.trajectory.size(); ++i) {
    if (!(demo.trajectory[i].t > demo.trajectory[i - 1].t)) {
      throw Error(ErrorCode::kSchemaError, "trajectory times must increase");
    }
  }
  for (const SceneObject& o : demo.scene.objects) {
    if (!o.movable) continue;
    const ObjectTrack* tr = demo.track(o.id);
    if (!tr || tr->poses.empty()) {
      throw Error(ErrorCode::kSchemaError, "no track for object '" + o.id + "'");
    }
  }
}

namespace {

std::size_t sample_at_or_after(const std::vector<TrajectorySample>& traj, double t) {
  const auto it = std::lower_bound(traj.begin(), traj.end(), t,
                                   [](const TrajectorySample& s, double v) { return s.t < v; });
  return it == traj.end() ? traj.size() - 1 : static_cast<std::size_t>(it - traj.begin());
}

Point2 hand_at(const std::vector<TrajectorySample>& traj, double t) {
  const std::size_t i = sample_at_or_after(traj, t);
  if (i == 0 || traj[i].t <= t) return traj[i].hand;
  const TrajectorySample& a = traj[i - 1];
  const TrajectorySample& b = traj[i];
  const double u = (t - a.t) / (b.t - a.t);
  return a.hand + u * (b.hand - a.hand);
}

ArmConfig config_at(const TrajectorySample& s) {
  return config_from_joints(s.upper_arm, s.elbow, s.hand);
}

// Time of the first recorded displacement, or nullopt for a static object.
std::optional<double> first_motion(const ObjectTrack& tr) {
  for (const TrackPose& p : tr.poses) {
    if (dist(p.center, tr.initial()) > 1e-12) return p.t;
  }
  return std::nullopt;
}

struct Crossing {
  double t;
  Point2 point;
};

std::optional<Crossing> crossing_of(const std::vector<TrajectorySample>& traj, double y) {
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double y0 = traj[i - 1].hand.y;
    const double y1 = traj[i].hand.y;
    if (y0 < y && y1 >= y) {
      const double u = (y - y0) / (y1 - y0);
      return Crossing{traj[i - 1].t + u * (traj[i].t - traj[i - 1].t),
                      traj[i - 1].hand + u * (traj[i].hand - traj[i - 1].hand)};
    }
  }
  return std::nullopt;
}

const Gap* gap_containing(const Decomposition& d, int row, double x) {
  const Gap* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Gap* g : d.gaps_in_row(row)) {
    const double off = x < g->x_lo ? g->x_lo - x : (x > g->x_hi ? x - g->x_hi : 0.0);
    if (off < best_d) {
      best_d = off;
      best = g;
    }
  }
  return best;
}

bool strictly_inside_gap(const Decomposition& d, int row, double x) {
  for (const Gap* g : d.gaps_in_row(row)) {
    if (x > g->x_lo && x < g->x_hi) return true;
  }
  return false;
}

}  // namespace

std::vector<StateActionPair> segment_demonstration(const Demonstration& demo,
                                                   const SegmentationOptions& options) {
  validate(demo);
  const Scene& scene = demo.scene;
  const Decomposition d = decompose(scene);
  const auto& traj = demo.trajectory;
  std::vector<StateActionPair> pairs;
  for (const Row& row : d.rows) {
    StateActionPair pair;
    pair.action.row = row.index;
    const std::optional<Crossing> cross = crossing_of(traj, row.y_mid());

    const SceneObject* moved = nullptr;
    double moved_by = 0.0;
    for (const std::string& id : row.member_ids) {
      const SceneObject* o = scene.find(id);
      const ObjectTrack* tr = demo.track(id);
      if (!o->movable || !tr) continue;
      const double disp = dist(tr->final(), tr->initial());
      if (disp > options.move_threshold * o->footprint.half_w && disp > moved_by) {
        moved = o;
        moved_by = disp;
      }
    }

    if (moved) {
      const ObjectTrack* tr = demo.track(moved->id);
      const double t_pick = first_motion(*tr).value_or(traj.front().t);
      pair.action.kind = ActionKind::kObject;
      pair.action.element = moved->id;
      pair.action.direction = quantize_direction(tr->final() - tr->initial(),
                                                 moved->footprint.half_w,
                                                 moved->footprint.half_h);
      pair.action.new_pos = tr->final();
      pair.time = t_pick;
      pair.keypoint = hand_at(traj, t_pick);
      pair.ambiguous = cross && strictly_inside_gap(d, row.index, cross->point.x);
    } else {
      if (!cross) {
        throw Error(ErrorCode::kNoCrossing,
                    "hand never crosses row " + std::to_string(row.index) + " in trial '" +
                        demo.trial + "'");
      }
      const Gap* g = gap_containing(d, row.index, cross->point.x);
      if (!g) {
        throw Error(ErrorCode::kNoCrossing, "row " + std::to_string(row.index) + " has no gaps");
      }
      pair.action.kind = ActionKind::kGap;
      pair.action.element = g->id();
      pair.time = cross->t;
      pair.keypoint = cross->point;
    }
    const std::size_t k = sample_at_or_after(traj, pair.time);
    pair.config = config_at(traj[k]);
    const Point2 before = hand_at(traj, pair.time - options.approach_window);
    const Point2 v = pair.keypoint - before;
    pair.approach = norm(v) > 1e-9 ? quantize_direction(v) : Direction::kFF;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

KeypointTrace keypoint_trace(const Demonstration& demo,
                             const std::vector<StateActionPair>& pairs) {
  KeypointTrace kt;
  const auto& traj = demo.trajectory;
  kt.points.push_back(traj.front().hand);
  kt.configs.push_back(config_at(traj.front()));
  for (const StateActionPair& p : pairs) {
    kt.points.push_back(p.keypoint);
    kt.configs.push_back(p.config);
  }
  kt.points.push_back(traj.back().hand);
  kt.configs.push_back(config_at(traj.back()));
  return kt;
}

namespace {

std::vector<PlanElement> row_elements(const Scene& scene, const Decomposition& d, int row) {
  std::vector<PlanElement> out;
  for (const Gap* g : d.gaps_in_row(row)) out.push_back(element_for(*g));
  for (const std::string& id : d.rows[row].member_ids) {
    const SceneObject* o = scene.find(id);
    if (o->movable) out.push_back(element_for(*o, row));
  }
  return out;
}

LabeledSet empty_set(ModelKind kind, int arity) {
  LabeledSet s;
  s.kind = kind;
  s.arity = arity;
  return s;
}

}  // namespace

TrainingBundle build_training_bundle(const std::vector<Demonstration>& demos,
                                     const BundleOptions& options) {
  TrainingBundle b;
  b.gap_set = empty_set(ModelKind::kBinary, kGapArity);
  b.object_set = empty_set(ModelKind::kBinary, kObjectArity);
  b.direction_set = empty_set(ModelKind::kMulticlass8, kDirectionArity);
  b.segment_set = empty_set(ModelKind::kBinary, kSegmentArity);
  b.arm_set = empty_set(ModelKind::kRegressor2, kArmArity);

  for (const Demonstration& demo : demos) {
    const std::vector<StateActionPair> pairs =
        segment_demonstration(demo, options.segmentation);
    if (pairs.empty()) continue;
    const Scene& scene = demo.scene;
    const ArmModel arm = arm_model_for(scene, options.arm);
    const NormalizationContext ctx = make_context(scene, arm);
    const Decomposition d = decompose(scene);
    const std::string& group = demo.source;

    for (const StateActionPair& p : pairs) {
      const int row = p.action.row;
      if (p.action.kind == ActionKind::kGap) {
        for (const Gap* g : d.gaps_in_row(row)) {
          b.gap_set.add(gap_features(*g, scene, ctx).values(),
                        g->id() == p.action.element ? 1 : 0, group);
        }
      } else {
        for (const std::string& id : d.rows[row].member_ids) {
          const SceneObject* o = scene.find(id);
          if (!o->movable) continue;
          b.object_set.add(object_features(*o, scene, ctx, options.alpha, options.n_lines).values(),
                           id == p.action.element ? 1 : 0, group);
        }
        const SceneObject* moved = scene.find(p.action.element);
        b.direction_set.add(
            direction_features(*moved, p.approach, scene, ctx, options.alpha, options.n_lines)
                .values(),
            index_of(p.action.direction), group);
      }
    }

    for (std::size_t r = 0; r + 1 < pairs.size(); ++r) {
      const auto first = row_elements(scene, d, static_cast<int>(r));
      const auto second = row_elements(scene, d, static_cast<int>(r + 1));
      for (const PlanElement& e1 : first) {
        const ArmConfig c1 = inverse_kinematics(arm, e1.position);
        for (const PlanElement& e2 : second) {
          const ArmTrace trace{arm, c1, inverse_kinematics(arm, e2.position)};
          const bool taken = e1.id == pairs[r].action.element &&
                             e2.id == pairs[r + 1].action.element;
          b.segment_set.add(segment_features(e1, e2, scene, ctx, trace, options.n_lines).values(),
                            taken ? 1 : 0, group);
        }
      }
    }

    const KeypointTrace kt = keypoint_trace(demo, pairs);
    for (std::size_t i = 1; i < kt.points.size(); ++i) {
      const Direction h = approach_direction(kt.points[i - 1], kt.points[i]);
      const ArmFeatures f = arm_features(h, kt.configs[i - 1], kt.points[i - 1], kt.points[i], ctx);
      b.arm_set.add(f.values(), {kt.configs[i].theta_sh, kt.configs[i].theta_el}, group);
    }
  }
  if (b.gap_set.size() + b.object_set.size() == 0) {
    throw Error(ErrorCode::kEmptyBundle, "no row decisions in the demonstrations");
  }
  return b;
}

Point2 relocation_target(const SceneObject& obj, Direction d, double factor) {
  const Point2 off = direction_offset(d);
  const Rect& fp = obj.footprint;
  return fp.center + Point2{off.x * (1.0 + factor) * fp.half_w,
                            off.y * (1.0 + factor) * fp.half_h};
}

bool relocation_feasible(const Scene& scene, const SceneObject& obj, Point2 new_center) {
  const Rect moved{new_center, obj.footprint.half_w, obj.footprint.half_h};
  if (!scene.table.rect().contains({moved.lo_x(), moved.lo_y()}) ||
      !scene.table.rect().contains({moved.hi_x(), moved.hi_y()})) {
    return false;
  }
  if (overlap_area(moved, scene.target.footprint) > 0.0) return false;
  for (const SceneObject& o : scene.objects) {
    if (o.id == obj.id) continue;
    if (overlap_area(moved, o.footprint) > 0.0) return false;
  }
  return true;
}

namespace {

// Lateral moves first, then moves towards the start, then forward.
constexpr std::array<double, kNumDirections> kDirectionPreference = {
    0.0, 0.1, 0.3, 0.2, 0.0, 0.2, 0.3, 0.1};

constexpr double kBandMargin = 0.015;
constexpr double kHold = 0.15;

struct Leg {
  double t0 = 0.0;
  double duration = 0.0;
  Point2 from;
  Point2 to;
  std::string carried;  // object moving with the hand
};

double min_jerk(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

class LegBuilder {
 public:
  LegBuilder(Point2 start, double speed) : at_(start), speed_(speed) {}

  void move_to(Point2 p, std::string carried = {}) {
    const double d = dist(at_, p);
    if (d < 1e-12) return;
    legs_.push_back({t_, 0.3 + d / speed_, at_, p, std::move(carried)});
    t_ += legs_.back().duration;
    at_ = p;
  }
  void hold(double seconds) {
    legs_.push_back({t_, seconds, at_, at_, {}});
    t_ += seconds;
  }
  double now() const { return t_; }
  Point2 at() const { return at_; }
  const std::vector<Leg>& legs() const { return legs_; }

 private:
  Point2 at_;
  double speed_;
  double t_ = 0.0;
  std::vector<Leg> legs_;
};

double participant_weight(const PolicyParams& params, int participant) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(participant));
  const double u = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  return params.offset_weight * (1.0 + params.participant_spread * u);
}

}  // namespace

std::optional<Demonstration> demonstrate(const Scene& scene, int participant,
                                         std::uint64_t seed, const PolicyParams& params) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, params.noise);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double kappa = participant_weight(params, participant);
  const Decomposition d = decompose(scene);
  const double tx = scene.target.footprint.center.x;
  const ArmModel arm = arm_model_for(scene);

  // Where a moved object goes: a feasible place off the hand's corridor,
  // preferring free, lateral blocks.
  auto choose_direction = [&](const Scene& now, const SceneObject& o)
      -> std::optional<std::pair<Direction, Point2>> {
    const DirectionBlocks blocks = direction_blocks(o, now);
    std::optional<std::pair<Direction, Point2>> pick;
    double best = -std::numeric_limits<double>::infinity();
    for (Direction cand : kAllDirections) {
      const Point2 p = relocation_target(o, cand, params.move_distance_factor);
      if (!relocation_feasible(now, o, p)) continue;
      const double x = o.footprint.center.x;
      const double half = o.footprint.half_w;
      if (overlap_1d(p.x - half, p.x + half, x - params.clearance / 2, x + params.clearance / 2) >
          0.0) {
        continue;
      }
      const int k = index_of(cand);
      const double s = blocks.free_area[k] / blocks.blocks[k].area() + kDirectionPreference[k] +
                       0.1 * unit(rng);
      if (s > best) {
        best = s;
        pick = std::make_pair(cand, p);
      }
    }
    return pick;
  };

  Scene now = scene;
  std::vector<RowAction> actions;
  for (const Row& row : d.rows) {
    RowAction a;
    a.row = row.index;
    // The widest gap near the line to the target, if the hand fits.
    const Gap* gap = nullptr;
    double best = -std::numeric_limits<double>::infinity();
    for (const Gap* g : d.gaps_in_row(row.index)) {
      const double offset = std::abs(g->center.x - tx);
      if (g->width < params.clearance || offset > params.corridor) continue;
      const double s = g->width - kappa * offset + noise(rng);
      if (s > best) {
        best = s;
        gap = g;
      }
    }
    if (gap) {
      a.kind = ActionKind::kGap;
      a.element = gap->id();
      actions.push_back(std::move(a));
      continue;
    }
    // Otherwise the least hemmed-in object near the line is pushed aside.
    const SceneObject* pick = nullptr;
    std::pair<Direction, Point2> where;
    best = -std::numeric_limits<double>::infinity();
    for (const std::string& id : row.member_ids) {
      const SceneObject* o = now.find(id);
      if (!o->movable) continue;
      const double offset = std::abs(o->footprint.center.x - tx);
      if (offset > params.corridor + o->footprint.half_w) continue;
      const auto dir = choose_direction(now, *o);
      if (!dir) continue;
      const DirectionBlocks blocks = direction_blocks(*o, now);
      const double s = blocks.total_free() / blocks.total_area() - kappa * offset + noise(rng);
      if (s > best) {
        best = s;
        pick = o;
        where = *dir;
      }
    }
    if (!pick) return std::nullopt;
    a.kind = ActionKind::kObject;
    a.element = pick->id;
    a.direction = where.first;
    a.new_pos = where.second;
    now = now.with_object_at(pick->id, where.second);
    actions.push_back(std::move(a));
  }

  LegBuilder legs(scene.start, params.hand_speed);
  for (RowAction& act : actions) {
    const Row& row = d.rows[static_cast<std::size_t>(act.row)];
    if (act.kind == ActionKind::kGap) {
      const double x = d.find_gap(act.element)->center.x;
      legs.move_to({x, row.y_lo - kBandMargin});
      legs.move_to({x, row.y_hi + kBandMargin});
      continue;
    }
    const Rect& fp = scene.find(act.element)->footprint;
    legs.move_to({fp.center.x, row.y_lo - kBandMargin});
    act.contact_begin = legs.now();
    legs.move_to(fp.center);
    legs.hold(kHold);
    legs.move_to(*act.new_pos, act.element);
    legs.hold(kHold);
    legs.move_to(fp.center);
    legs.move_to({fp.center.x, row.y_hi + kBandMargin});
    act.contact_end = legs.now();
  }
  const Rect& target = scene.target.footprint;
  legs.move_to({target.center.x, target.lo_y() - kBandMargin});
  legs.move_to(target.center);

  Demonstration demo;
  demo.scene = scene;
  demo.ground_truth = actions;
  std::map<std::string, ObjectTrack> tracks;
  for (const SceneObject& o : scene.objects) {
    tracks[o.id] = ObjectTrack{o.id, {{0.0, o.footprint.center}}};
  }
  const double end = legs.now();
  const int n_samples = static_cast<int>(std::ceil(end * kSampleRate)) + 1;
  std::size_t leg = 0;
  const auto& all = legs.legs();
  for (int k = 0; k < n_samples; ++k) {
    const double t = k / kSampleRate;
    while (leg + 1 < all.size() && t >= all[leg].t0 + all[leg].duration) ++leg;
    const Leg& l = all.empty() ? Leg{} : all[leg];
    Point2 hand = scene.start;
    if (!all.empty()) {
      const double u = l.duration > 0 ? (t - l.t0) / l.duration : 1.0;
      hand = l.from + min_jerk(u) * (l.to - l.from);
    }
    TrajectorySample s;
    s.t = t;
    s.hand = hand;
    s.upper_arm = arm.shoulder();
    s.elbow = forward_kinematics(arm, inverse_kinematics(arm, hand)).elbow;
    demo.trajectory.push_back(s);
    if (!all.empty() && !l.carried.empty() && t > l.t0) {
      const double u = (t - l.t0) / l.duration;
      tracks[l.carried].poses.push_back({t, u >= 1.0 ? l.to : hand});
    }
  }
  // Carry legs end exactly on the release position.
  for (const Leg& l : all) {
    if (l.carried.empty()) continue;
    auto& poses = tracks[l.carried].poses;
    if (poses.back().center != l.to) poses.push_back({poses.back().t + 1e-6, l.to});
  }
  for (auto& [id, tr] : tracks) demo.object_tracks.push_back(tr);

  // Reject demonstrations whose hand passes through an object it is not
  // handling.
  for (const TrajectorySample& s : demo.trajectory) {
    for (const ObjectTrack& tr : demo.object_tracks) {
      bool handled = false;
      for (const RowAction& a : actions) {
        if (a.kind == ActionKind::kObject && a.element == tr.id && s.t >= a.contact_begin &&
            s.t <= a.contact_end) {
          handled = true;
        }
      }
      if (handled) continue;
      const SceneObject* o = scene.find(tr.id);
      const Rect fp{tr.at(s.t), o->footprint.half_w, o->footprint.half_h};
      if (fp.contains(s.hand) && s.hand.x > fp.lo_x() && s.hand.x < fp.hi_x() &&
          s.hand.y > fp.lo_y() && s.hand.y < fp.hi_y()) {
        return std::nullopt;
      }
    }
  }
  return demo;
}

std::vector<Demonstration> generate_synthetic_demos(int n, std::uint64_t seed,
                                                    const PolicyParams& params) {
  std::mt19937_64 rng(seed);
  std::vector<Demonstration> out;
  out.reserve(n);
  const int participants = std::max(1, params.participants);
  for (int i = 0; i < n; ++i) {
    const int p = i % participants;
    for (;;) {
      const Scene scene = canonical_scene(rng, params.narrow_probability);
      std::optional<Demonstration> demo = demonstrate(scene, p, rng(), params);
      if (!demo) continue;
      char name[16];
      std::snprintf(name, sizeof name, "p%02d", p);
      demo->source = name;
      std::snprintf(name, sizeof name, "t%04d", i);
      demo->trial = name;
      out.push_back(std::move(*demo));
      break;
    }
  }
  return out;
}

namespace {

json point_json(Point2 p) { return json::array({p.x, p.y}); }

Point2 point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::kSchemaError, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json action_json(const RowAction& a) {
  json j = {{"row", a.row}, {"kind", to_string(a.kind)}, {"element", a.element}};
  if (a.kind == ActionKind::kObject) {
    j["direction"] = to_string(a.direction);
    if (a.new_pos) j["new_pos"] = point_json(*a.new_pos);
    j["contact"] = {a.contact_begin, a.contact_end};
  }
  return j;
}

RowAction action_from(const json& j) {
  RowAction a;
  a.row = j.at("row").get<int>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "gap" && kind != "object") {
    throw Error(ErrorCode::kSchemaError, "unknown action kind '" + kind + "'");
  }
  a.kind = kind == "gap" ? ActionKind::kGap : ActionKind::kObject;
  a.element = j.at("element").get<std::string>();
  if (a.kind == ActionKind::kObject) {
    a.direction = direction_from_string(j.at("direction").get<std::string>());
    if (j.contains("new_pos")) a.new_pos = point_from(j.at("new_pos"));
    if (j.contains("contact")) {
      a.contact_begin = j.at("contact").at(0).get<double>();
      a.contact_end = j.at("contact").at(1).get<double>();
    }
  }
  return a;
}

}  // namespace

json to_json(const Demonstration& demo) {
  json samples = json::array();
  for (const TrajectorySample& s : demo.trajectory) {
    samples.push_back({{"t", s.t},
                       {"hand", point_json(s.hand)},
                       {"elbow", point_json(s.elbow)},
                       {"upper_arm", point_json(s.upper_arm)}});
  }
  json tracks = json::object();
  for (const ObjectTrack& tr : demo.object_tracks) {
    json poses = json::array();
    for (const TrackPose& p : tr.poses) poses.push_back({p.t, p.center.x, p.center.y});
    tracks[tr.id] = poses;
  }
  json doc = {{"source", demo.source},
              {"trial", demo.trial},
              {"scene", to_json(demo.scene)},
              {"samples", samples},
              {"object_tracks", tracks}};
  if (!demo.ground_truth.empty()) {
    json gt = json::array();
    for (const RowAction& a : demo.ground_truth) gt.push_back(action_json(a));
    doc["ground_truth_actions"] = gt;
  }
  return doc;
}

Demonstration demonstration_from_json(const json& doc) {
  try {
    Demonstration demo;
    demo.source = doc.value("source", std::string());
    demo.trial = doc.value("trial", std::string());
    demo.scene = load_scene(doc.at("scene"));
    for (const json& s : doc.at("samples")) {
      demo.trajectory.push_back({s.at("t").get<double>(), point_from(s.at("hand")),
                                 point_from(s.at("elbow")), point_from(s.at("upper_arm"))});
    }
    for (const auto& [id, poses] : doc.at("object_tracks").items()) {
      ObjectTrack tr{id, {}};
      for (const json& p : poses) {
        tr.poses.push_back({p.at(0).get<double>(), {p.at(1).get<double>(), p.at(2).get<double>()}});
      }
      demo.object_tracks.push_back(std::move(tr));
    }
    if (doc.contains("ground_truth_actions")) {
      for (const json& a : doc.at("ground_truth_actions")) {
        demo.ground_truth.push_back(action_from(a));
      }
    }
    validate(demo);
    return demo;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("demonstration: ") + e.what());
  }
}

void save_demos_jsonl(const std::vector<Demonstration>& demos,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const Demonstration& d : demos) out << to_json(d).dump() << "\n";
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<Demonstration> load_demos_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<Demonstration> demos;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSchemaError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    demos.push_back(demonstration_from_json(doc));
  }
  return demos;
}

namespace {

constexpr const char* kVrFormat = "hlp-vr-trial";

json vec3(Point2 p, double height) { return json::array({p.x, height, p.y}); }

Point2 planar(const json& v) {
  if (!v.is_array() || v.size() != 3) throw Error(ErrorCode::kSchemaError, "expected [x, y, z]");
  return {v[0].get<double>(), v[2].get<double>()};
}

json vr_object(const SceneObject& o, double height) {
  return {{"name", o.id},
          {"position", vec3(o.footprint.center, height)},
          {"size", {o.footprint.width(), 0.12, o.footprint.height()}},
          {"shape", to_string(o.shape)}};
}

SceneObject vr_object_from(const json& j) {
  SceneObject o;
  o.id = j.at("name").get<std::string>();
  const auto size = j.at("size").get<std::vector<double>>();
  if (size.size() != 3) throw Error(ErrorCode::kSchemaError, "size must be [w, h, d]");
  o.footprint = {planar(j.at("position")), size[0] / 2, size[2] / 2};
  o.shape = shape_from_string(j.value("shape", std::string("box")));
  return o;
}

Demonstration vr_trial_from(const json& doc, const std::string& participant,
                            const std::string& trial) {
  if (doc.value("format", std::string()) != kVrFormat) {
    throw Error(ErrorCode::kSchemaError, "not a trial document");
  }
  Demonstration demo;
  demo.source = participant;
  demo.trial = trial;
  const json& table = doc.at("table");
  demo.scene.table = {table.at("width").get<double>(), table.at("depth").get<double>()};
  demo.scene.start = planar(doc.at("home"));
  demo.scene.target = vr_object_from(doc.at("target"));
  demo.scene.target.id = std::string(kTargetId);
  for (const json& o : doc.at("obstacles")) demo.scene.objects.push_back(vr_object_from(o));
  validate(demo.scene);

  std::map<std::string, ObjectTrack> tracks;
  for (const SceneObject& o : demo.scene.objects) {
    tracks[o.id] = ObjectTrack{o.id, {{0.0, o.footprint.center}}};
  }
  bool first = true;
  for (const json& f : doc.at("frames")) {
    TrajectorySample s;
    s.t = f.at("t").get<double>();
    s.hand = planar(f.at("hand"));
    s.elbow = planar(f.at("elbow"));
    s.upper_arm = planar(f.at("upper_arm"));
    if (first) {
      for (auto& [id, tr] : tracks) tr.poses.front().t = s.t;
      first = false;
    }
    demo.trajectory.push_back(s);
    if (!f.contains("objects")) continue;
    for (const auto& [id, pos] : f.at("objects").items()) {
      auto it = tracks.find(id);
      if (it == tracks.end()) continue;
      const Point2 p = planar(pos);
      if (dist(p, it->second.poses.back().center) > 1e-9) it->second.poses.push_back({s.t, p});
    }
  }
  for (auto& [id, tr] : tracks) demo.object_tracks.push_back(std::move(tr));
  validate(demo);
  return demo;
}

}  // namespace

VrLoadReport load_vr_dataset(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::kIo, "cannot read dataset directory " + root.string());
  }
  std::vector<fs::path> participants;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) participants.push_back(entry.path());
  }
  std::sort(participants.begin(), participants.end());
  VrLoadReport report;
  int trial_files = 0;
  for (const fs::path& dir : participants) {
    std::vector<fs::path> trials;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        trials.push_back(entry.path());
      }
    }
    std::sort(trials.begin(), trials.end());
    for (const fs::path& file : trials) {
      ++trial_files;
      const std::string name = dir.filename().string() + "/" + file.filename().string();
      try {
        std::ifstream in(file);
        if (!in) throw Error(ErrorCode::kIo, "unreadable");
        const json doc = json::parse(in);
        report.demos.push_back(
            vr_trial_from(doc, dir.filename().string(), file.stem().string()));
      } catch (const json::exception& e) {
        report.skipped.push_back({name, e.what()});
      } catch (const Error& e) {
        report.skipped.push_back({name, e.what()});
      }
    }
  }
  if (trial_files == 0) {
    throw Error(ErrorCode::kLayout,
                root.string() + " holds no <participant>/<trial>.json files");
  }
  return report;
}

void write_vr_trial(const Demonstration& demo, const std::filesystem::path& root,
                    double height) {
  const std::filesystem::path dir = root / (demo.source.empty() ? "unknown" : demo.source);
  std::filesystem::create_directories(dir);
  json obstacles = json::array();
  for (const SceneObject& o : demo.scene.objects) obstacles.push_back(vr_object(o, height));
  json frames = json::array();
  for (const TrajectorySample& s : demo.trajectory) {
    json objects = json::object();
    for (const ObjectTrack& tr : demo.object_tracks) objects[tr.id] = vec3(tr.at(s.t), height);
    frames.push_back({{"t", s.t},
                      {"hand", vec3(s.hand, height + 0.05)},
                      {"elbow", vec3(s.elbow, height + 0.15)},
                      {"upper_arm", vec3(s.upper_arm, height + 0.3)},
                      {"objects", objects}});
  }
  const json doc = {{"format", kVrFormat},
                    {"version", 1},
                    {"table", {{"width", demo.scene.table.width},
                               {"depth", demo.scene.table.height},
                               {"height", height}}},
                    {"home", vec3(demo.scene.start, height)},
                    {"target", vr_object(demo.scene.target, height)},
                    {"obstacles", obstacles},
                    {"frames", frames}};
  const std::filesystem::path file = dir / ((demo.trial.empty() ? "trial" : demo.trial) + ".json");
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + file.string());
  out << doc.dump() << "\n";
}

}  // namespace hlp
