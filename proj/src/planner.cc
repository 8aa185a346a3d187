#include "hlp/planner.h"

#include <algorithm>
#include <chrono>
#include <functional>

#include "hlp/error.h"

namespace hlp {

using nlohmann::json;

namespace {

void expect_model(const KernelModel& m, ModelKind kind, int arity, const char* name) {
  if (m.kind() != kind || m.arity() != arity) {
    throw Error(ErrorCode::kArity, std::string(name) + " model must be " +
                                       std::string(to_string(kind)) + " of arity " +
                                       std::to_string(arity));
  }
}

constexpr std::array<const char*, 5> kModelFiles = {"gap.json", "object.json",
                                                    "direction.json", "segment.json",
                                                    "arm.json"};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void ModelSet::check() const {
  expect_model(gap, ModelKind::kBinary, kGapArity, "gap");
  expect_model(object, ModelKind::kBinary, kObjectArity, "object");
  expect_model(direction, ModelKind::kMulticlass8, kDirectionArity, "direction");
  expect_model(segment, ModelKind::kBinary, kSegmentArity, "segment");
  expect_model(arm, ModelKind::kRegressor2, kArmArity, "arm");
}

void save_models(const ModelSet& models, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const KernelModel* all[] = {&models.gap, &models.object, &models.direction, &models.segment,
                              &models.arm};
  for (std::size_t i = 0; i < kModelFiles.size(); ++i) save_model(*all[i], dir / kModelFiles[i]);
}

ModelSet load_models(const std::filesystem::path& dir) {
  ModelSet m;
  KernelModel* all[] = {&m.gap, &m.object, &m.direction, &m.segment, &m.arm};
  for (std::size_t i = 0; i < kModelFiles.size(); ++i) *all[i] = load_model(dir / kModelFiles[i]);
  m.check();
  return m;
}

std::vector<ScoredElement> RowCandidates::all() const {
  std::vector<ScoredElement> out = gaps;
  out.insert(out.end(), objects.begin(), objects.end());
  return out;
}

namespace {

void rank_and_truncate(std::vector<ScoredElement>& v, int keep) {
  std::sort(v.begin(), v.end(), [](const ScoredElement& a, const ScoredElement& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.element.id < b.element.id;
  });
  if (keep >= 0 && static_cast<int>(v.size()) > keep) v.resize(keep);
}

}  // namespace

RowCandidates select_row_candidates(const Row& row, const Scene& scene,
                                    const Decomposition& decomposition,
                                    const ModelSet& models, const PlannerConfig& cfg) {
  const NormalizationContext ctx = make_context(scene, arm_model_for(scene, cfg.arm));
  RowCandidates rc;
  rc.row = row.index;
  for (const Gap* g : decomposition.gaps_in_row(row.index)) {
    const auto x = gap_features(*g, scene, ctx).values();
    rc.gaps.push_back({element_for(*g), models.gap.predict_proba(x)});
  }
  for (const std::string& id : row.member_ids) {
    const SceneObject* o = scene.find(id);
    if (!o || !o->movable) continue;
    const auto x = object_features(*o, scene, ctx, cfg.alpha, cfg.n_lines).values();
    rc.objects.push_back({element_for(*o, row.index), models.object.predict_proba(x)});
  }
  if (rc.gaps.empty() && rc.objects.empty()) {
    throw Error(ErrorCode::kNoCandidates,
                "row " + std::to_string(row.index) + " has no gaps and no movable objects");
  }
  rank_and_truncate(rc.gaps, cfg.gaps_per_row);
  rank_and_truncate(rc.objects, cfg.objects_per_row);
  return rc;
}

std::vector<CandidateSegment> construct_segments(const RowCandidates& first,
                                                 const RowCandidates& second,
                                                 const Scene& scene,
                                                 const ModelSet& models,
                                                 const PlannerConfig& cfg) {
  const ArmModel arm = arm_model_for(scene, cfg.arm);
  const NormalizationContext ctx = make_context(scene, arm);
  std::vector<CandidateSegment> out;
  for (const ScoredElement& a : first.all()) {
    const ArmConfig c1 = inverse_kinematics(arm, a.element.position);
    for (const ScoredElement& b : second.all()) {
      CandidateSegment s;
      s.e1 = a.element;
      s.e2 = b.element;
      const ArmTrace trace{arm, c1, inverse_kinematics(arm, b.element.position)};
      s.features = segment_features(s.e1, s.e2, scene, ctx, trace, cfg.n_lines);
      s.c_zeta = s.features.c_zeta * ctx.table_area;
      s.score = models.segment.predict_proba(s.features.values());
      s.rank_score = cfg.joint_segment_score ? s.score * a.score * b.score : s.score;
      out.push_back(std::move(s));
    }
  }
  std::sort(out.begin(), out.end(), [](const CandidateSegment& a, const CandidateSegment& b) {
    if (a.rank_score != b.rank_score) return a.rank_score > b.rank_score;
    if (a.e1.id != b.e1.id) return a.e1.id < b.e1.id;
    return a.e2.id < b.e2.id;
  });
  if (cfg.segments > 0 && static_cast<int>(out.size()) > cfg.segments) out.resize(cfg.segments);
  return out;
}

Relocation predict_object_relocation(const SceneObject& obj, Direction approach,
                                     const Scene& scene, const Scene& current,
                                     const ModelSet& models, const PlannerConfig& cfg) {
  const NormalizationContext ctx = make_context(scene, arm_model_for(scene, cfg.arm));
  const DirectionFeatures f = direction_features(obj, approach, scene, ctx, cfg.alpha, cfg.n_lines);
  Relocation r;
  r.scores = models.direction.class_scores(f.values());
  std::array<int, kNumDirections> order{};
  for (int i = 0; i < kNumDirections; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return r.scores[a] > r.scores[b]; });
  const SceneObject* now = current.find(obj.id);
  for (int k : order) {
    const Direction d = kAllDirections[k];
    const Point2 p = relocation_target(*now, d, cfg.move_distance_factor);
    if (relocation_feasible(current, *now, p)) {
      r.direction = d;
      r.new_pos = p;
      return r;
    }
  }
  throw Error(ErrorCode::kBlockedRelocation, "object '" + obj.id + "' has nowhere to go");
}

std::string_view to_string(Keypoint::Kind kind) {
  switch (kind) {
    case Keypoint::Kind::kStart: return "start";
    case Keypoint::Kind::kGap: return "gap";
    case Keypoint::Kind::kObject: return "object";
    case Keypoint::Kind::kTarget: return "target";
  }
  return "start";
}

PathEvaluation evaluate_path(const Scene& scene, const std::vector<PlanElement>& elements,
                             const ModelSet& models, const PlannerConfig& cfg) {
  PathEvaluation ev;
  ev.elements = elements;
  ev.relocated = scene;
  const ArmModel arm = arm_model_for(scene, cfg.arm);
  const NormalizationContext ctx = make_context(scene, arm);

  Keypoint start;
  start.kind = Keypoint::Kind::kStart;
  start.position = scene.start;
  ev.keypoints.push_back(start);
  for (const PlanElement& e : elements) {
    Keypoint k;
    k.kind = e.is_object() ? Keypoint::Kind::kObject : Keypoint::Kind::kGap;
    k.position = e.position;
    k.element = e.id;
    k.row = e.row;
    if (e.is_object()) {
      const SceneObject* obj = scene.find(e.id);
      const Direction approach = approach_direction(ev.keypoints.back().position, e.position);
      try {
        const Relocation r =
            predict_object_relocation(*obj, approach, scene, ev.relocated, models, cfg);
        k.direction = r.direction;
        k.new_pos = r.new_pos;
        ev.relocated = ev.relocated.with_object_at(e.id, r.new_pos);
        ++ev.moves;
      } catch (const Error& err) {
        if (err.code() != ErrorCode::kBlockedRelocation) throw;
        ev.infeasible_reason = err.what();
        return ev;
      }
    }
    ev.keypoints.push_back(std::move(k));
  }
  Keypoint target;
  target.kind = Keypoint::Kind::kTarget;
  target.position = scene.target.footprint.center;
  ev.keypoints.push_back(target);

  for (std::size_t i = 0; i + 1 < elements.size(); ++i) {
    const ArmTrace trace{arm, inverse_kinematics(arm, elements[i].position),
                         inverse_kinematics(arm, elements[i + 1].position)};
    const SegmentFeatures f =
        segment_features(elements[i], elements[i + 1], scene, ctx, trace, cfg.n_lines);
    ev.classifier_score += models.segment.predict_proba(f.values());
  }

  std::vector<Point2> points;
  for (const Keypoint& k : ev.keypoints) points.push_back(k.position);
  const ArmConfig initial = inverse_kinematics(arm, scene.start);
  const std::vector<ArmConfig> trace = estimate_arm_trace(arm, models.arm, points, initial);
  for (std::size_t i = 0; i < trace.size(); ++i) ev.keypoints[i].config = trace[i];
  const std::vector<Rect> obstacles = obstacle_footprints(ev.relocated);
  ev.rho_zeta = trace_collision(arm, trace, obstacles, cfg.n_lines);
  ev.feasible = true;
  return ev;
}

bool better_path(const PathEvaluation& a, const PathEvaluation& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (a.rho_zeta != b.rho_zeta) return a.rho_zeta < b.rho_zeta;
  if (a.moves != b.moves) return a.moves < b.moves;
  if (a.classifier_score != b.classifier_score) return a.classifier_score > b.classifier_score;
  for (std::size_t i = 0; i < std::min(a.elements.size(), b.elements.size()); ++i) {
    if (a.elements[i].id != b.elements[i].id) return a.elements[i].id < b.elements[i].id;
  }
  return a.elements.size() < b.elements.size();
}

std::vector<RowAction> Plan::actions() const {
  std::vector<RowAction> out;
  for (const Keypoint& k : keypoints) {
    if (k.kind != Keypoint::Kind::kGap && k.kind != Keypoint::Kind::kObject) continue;
    RowAction a;
    a.row = k.row;
    a.kind = k.kind == Keypoint::Kind::kGap ? ActionKind::kGap : ActionKind::kObject;
    a.element = k.element;
    a.direction = k.direction;
    a.new_pos = k.new_pos;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Point2> Plan::points() const {
  std::vector<Point2> out;
  for (const Keypoint& k : keypoints) out.push_back(k.position);
  return out;
}

namespace {

json elements_json(const std::vector<ScoredElement>& v) {
  json out = json::array();
  for (const ScoredElement& s : v) out.push_back({{"id", s.element.id}, {"p", s.score}});
  return out;
}

std::string path_name(const std::vector<PlanElement>& elements) {
  std::string s;
  for (const PlanElement& e : elements) s += (s.empty() ? "" : ">") + e.id;
  return s;
}

}  // namespace

Plan plan(const Scene& scene, const ModelSet& models, const PlannerConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Decomposition d = decompose(scene);
  Plan result;
  json trace = {{"rows", json::array()}, {"segments", json::array()}, {"paths", json::array()}};

  if (d.rows.empty()) {
    const PathEvaluation ev = evaluate_path(scene, {}, models, cfg);
    result.keypoints = ev.keypoints;
    result.rho_zeta = ev.rho_zeta;
    result.candidate_paths = 1;
    trace["chosen"] = "";
    result.decision_trace = trace;
    result.timings.init_s = seconds_since(t0);
    result.timings.total_s = result.timings.init_s;
    return result;
  }

  std::vector<RowCandidates> rows;
  std::optional<Error> empty_row;
  for (const Row& row : d.rows) {
    try {
      rows.push_back(select_row_candidates(row, scene, d, models, cfg));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoCandidates) throw;
      if (!empty_row) empty_row = e;
      continue;
    }
    trace["rows"].push_back({{"row", row.index},
                             {"gaps", elements_json(rows.back().gaps)},
                             {"objects", elements_json(rows.back().objects)}});
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kNoFeasiblePlan, "no row offers a gap or a movable object");
  }
  if (empty_row) throw *empty_row;

  std::vector<std::vector<PlanElement>> paths;
  if (rows.size() == 1) {
    for (const ScoredElement& s : rows[0].all()) paths.push_back({s.element});
  } else {
    std::vector<std::vector<CandidateSegment>> segs;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      segs.push_back(construct_segments(rows[i], rows[i + 1], scene, models, cfg));
      json kept = json::array();
      for (const CandidateSegment& s : segs.back()) {
        kept.push_back({{"e1", s.e1.id}, {"e2", s.e2.id}, {"p", s.score}, {"c_zeta", s.c_zeta}});
      }
      trace["segments"].push_back(kept);
    }
    std::vector<PlanElement> current;
    std::function<void(std::size_t)> extend = [&](std::size_t i) {
      if (i == segs.size()) {
        paths.push_back(current);
        return;
      }
      for (const CandidateSegment& s : segs[i]) {
        if (i > 0 && s.e1.id != current.back().id) continue;
        if (i == 0) current.push_back(s.e1);
        current.push_back(s.e2);
        extend(i + 1);
        current.pop_back();
        if (i == 0) current.pop_back();
      }
    };
    extend(0);
  }
  result.timings.init_s = seconds_since(t0);

  std::optional<PathEvaluation> best;
  for (const auto& elements : paths) {
    PathEvaluation ev = evaluate_path(scene, elements, models, cfg);
    json entry = {{"path", path_name(elements)}, {"feasible", ev.feasible}};
    if (ev.feasible) {
      entry["rho_zeta"] = ev.rho_zeta;
      entry["moves"] = ev.moves;
      entry["score"] = ev.classifier_score;
    } else {
      entry["reason"] = ev.infeasible_reason;
    }
    trace["paths"].push_back(entry);
    if (ev.feasible && (!best || better_path(ev, *best))) best = std::move(ev);
  }
  if (!best) throw Error(ErrorCode::kNoFeasiblePlan, "every candidate path is blocked");
  trace["chosen"] = path_name(best->elements);
  result.keypoints = best->keypoints;
  result.rho_zeta = best->rho_zeta;
  result.candidate_paths = static_cast<int>(paths.size());
  result.decision_trace = std::move(trace);
  result.timings.total_s = seconds_since(t0);
  return result;
}

json to_json(const Plan& plan, bool mask_timings) {
  json keypoints = json::array();
  json actions = json::array();
  for (const Keypoint& k : plan.keypoints) {
    json j = {{"kind", to_string(k.kind)},
              {"position", {k.position.x, k.position.y}},
              {"arm", {k.config.theta_sh, k.config.theta_el}}};
    if (!k.element.empty()) j["element"] = k.element;
    if (k.row >= 0) j["row"] = k.row;
    if (k.kind == Keypoint::Kind::kObject) {
      j["direction"] = to_string(k.direction);
      if (k.new_pos) j["new_pos"] = {k.new_pos->x, k.new_pos->y};
    }
    keypoints.push_back(j);
  }
  for (const RowAction& a : plan.actions()) {
    json j = {{"row", a.row}, {"kind", to_string(a.kind)}, {"element", a.element}};
    if (a.kind == ActionKind::kObject) j["direction"] = to_string(a.direction);
    actions.push_back(j);
  }
  return {{"format", "hlp-plan"},
          {"version", 1},
          {"keypoints", keypoints},
          {"actions", actions},
          {"rho_zeta", plan.rho_zeta},
          {"candidate_paths", plan.candidate_paths},
          {"decision_trace", plan.decision_trace},
          {"timings",
           {{"init_s", mask_timings ? 0.0 : plan.timings.init_s},
            {"total_s", mask_timings ? 0.0 : plan.timings.total_s}}}};
}

std::vector<RowAction> plan_actions_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "hlp-plan") {
      throw Error(ErrorCode::kSchemaError, "not a plan document");
    }
    std::vector<RowAction> out;
    for (const json& j : doc.at("actions")) {
      RowAction a;
      a.row = j.at("row").get<int>();
      a.kind = j.at("kind").get<std::string>() == "object" ? ActionKind::kObject
                                                           : ActionKind::kGap;
      a.element = j.at("element").get<std::string>();
      if (j.contains("direction")) {
        a.direction = direction_from_string(j.at("direction").get<std::string>());
      }
      out.push_back(std::move(a));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("plan document: ") + e.what());
  }
}

Similarity similarity(const std::vector<RowAction>& planned,
                      const std::vector<RowAction>& reference) {
  if (planned.size() != reference.size() || planned.empty()) {
    throw Error(ErrorCode::kRowMismatch, "plan has " + std::to_string(planned.size()) +
                                             " rows, reference has " +
                                             std::to_string(reference.size()));
  }
  int sum = 0, d_count = 0, de_count = 0;
  for (std::size_t n = 0; n < planned.size(); ++n) {
    const int d = planned[n].kind == reference[n].kind ? 1 : 0;
    const int e = planned[n].element == reference[n].element ? 1 : 0;
    sum += d * (d + e);
    d_count += d;
    de_count += d * e;
  }
  const double n_rows = static_cast<double>(planned.size());
  return {sum / (2.0 * n_rows), d_count / n_rows, de_count / n_rows};
}

Similarity similarity(const Plan& plan, const std::vector<StateActionPair>& reference) {
  std::vector<RowAction> ref;
  for (const StateActionPair& p : reference) ref.push_back(p.action);
  return similarity(plan.actions(), ref);
}

}  // namespace hlp
