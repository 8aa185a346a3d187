#include "hlp/config.h"

#include <fstream>
#include <set>
#include <string>

#include "hlp/error.h"

namespace hlp {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::kSchemaError, where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw Error(ErrorCode::kSchemaError, "unknown field " + where + "." + key);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& into) {
  if (obj.contains(key)) into = obj.at(key).get<T>();
}

void read_path(const json& obj, const char* key, std::filesystem::path& into) {
  if (obj.contains(key)) into = obj.at(key).get<std::string>();
}

void positive(double v, const char* name) {
  if (!(v > 0.0)) throw Error(ErrorCode::kSchemaError, std::string(name) + " must be positive");
}

}  // namespace

RunConfig run_config_from_json(const json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "hlp-run-config") {
    throw Error(ErrorCode::kFormatVersion, "not an hlp-run-config document");
  }
  if (doc.value("version", 0) != 1) throw Error(ErrorCode::kFormatVersion, "unsupported config version");
  only_keys(doc, {"format", "version", "seed", "paths", "planner", "sto", "train", "policy"}, "config");

  RunConfig c;
  try {
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("paths")) {
      const json& p = doc.at("paths");
      only_keys(p, {"models", "scenes", "demos", "output"}, "paths");
      read_path(p, "models", c.paths.models);
      read_path(p, "scenes", c.paths.scenes);
      read_path(p, "demos", c.paths.demos);
      read_path(p, "output", c.paths.output);
    }
    if (doc.contains("planner")) {
      const json& p = doc.at("planner");
      only_keys(p, {"gaps_per_row", "objects_per_row", "segments", "alpha", "n_lines",
                    "move_distance_factor", "joint_segment_score", "arm"},
                "planner");
      read(p, "gaps_per_row", c.planner.gaps_per_row);
      read(p, "objects_per_row", c.planner.objects_per_row);
      read(p, "segments", c.planner.segments);
      read(p, "alpha", c.planner.alpha);
      read(p, "n_lines", c.planner.n_lines);
      read(p, "move_distance_factor", c.planner.move_distance_factor);
      read(p, "joint_segment_score", c.planner.joint_segment_score);
      if (p.contains("arm")) {
        const json& a = p.at("arm");
        only_keys(a, {"neck_shoulder", "upper_arm", "forearm", "body_offset"}, "planner.arm");
        read(a, "neck_shoulder", c.planner.arm.neck_shoulder);
        read(a, "upper_arm", c.planner.arm.upper_arm);
        read(a, "forearm", c.planner.arm.forearm);
        read(a, "body_offset", c.planner.arm.body_offset);
      }
    }
    if (doc.contains("sto")) {
      const json& s = doc.at("sto");
      only_keys(s, {"n_iterations", "n_samples", "noise_sigma", "horizon", "u_max",
                    "pre_grasp_margin", "w_distance", "w_push", "w_dropped"},
                "sto");
      read(s, "n_iterations", c.sto.n_iterations);
      read(s, "n_samples", c.sto.n_samples);
      read(s, "noise_sigma", c.sto.noise_sigma);
      read(s, "horizon", c.sto.horizon);
      read(s, "u_max", c.sto.u_max);
      read(s, "pre_grasp_margin", c.sto.pre_grasp_margin);
      read(s, "w_distance", c.sto.weights.distance);
      read(s, "w_push", c.sto.weights.push);
      read(s, "w_dropped", c.sto.weights.dropped);
    }
    if (doc.contains("train")) {
      const json& t = doc.at("train");
      only_keys(t, {"n_folds", "cross_validate", "gamma", "lambda", "max_iterations", "max_support",
                    "balance_classes", "gamma_scale"},
                "train");
      read(t, "n_folds", c.train.n_folds);
      read(t, "cross_validate", c.train.cross_validate);
      read(t, "gamma", c.train.options.gamma);
      read(t, "lambda", c.train.options.lambda);
      read(t, "max_iterations", c.train.options.max_iterations);
      read(t, "max_support", c.train.options.max_support);
      read(t, "balance_classes", c.train.options.balance_classes);
      read(t, "gamma_scale", c.train.gamma_scale);
    }
    if (doc.contains("policy")) {
      const json& p = doc.at("policy");
      only_keys(p, {"clearance", "corridor", "offset_weight", "participant_spread", "noise",
                    "participants", "narrow_probability"},
                "policy");
      read(p, "clearance", c.policy.clearance);
      read(p, "corridor", c.policy.corridor);
      read(p, "offset_weight", c.policy.offset_weight);
      read(p, "participant_spread", c.policy.participant_spread);
      read(p, "noise", c.policy.noise);
      read(p, "participants", c.policy.participants);
      read(p, "narrow_probability", c.policy.narrow_probability);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("config: ") + e.what());
  }

  positive(c.sto.n_iterations, "sto.n_iterations");
  positive(c.sto.n_samples, "sto.n_samples");
  positive(c.sto.noise_sigma, "sto.noise_sigma");
  positive(c.sto.horizon, "sto.horizon");
  positive(c.sto.u_max, "sto.u_max");
  positive(c.sto.pre_grasp_margin, "sto.pre_grasp_margin");
  positive(c.planner.gaps_per_row, "planner.gaps_per_row");
  positive(c.planner.objects_per_row, "planner.objects_per_row");
  positive(c.planner.alpha, "planner.alpha");
  positive(c.planner.n_lines, "planner.n_lines");
  positive(c.policy.participants, "policy.participants");
  return c;
}

json to_json(const RunConfig& c) {
  json doc = {{"format", "hlp-run-config"}, {"version", 1}};
  if (c.seed) doc["seed"] = *c.seed;
  doc["paths"] = {{"models", c.paths.models.string()},
                  {"scenes", c.paths.scenes.string()},
                  {"demos", c.paths.demos.string()},
                  {"output", c.paths.output.string()}};
  doc["planner"] = {{"gaps_per_row", c.planner.gaps_per_row},
                    {"objects_per_row", c.planner.objects_per_row},
                    {"segments", c.planner.segments},
                    {"alpha", c.planner.alpha},
                    {"n_lines", c.planner.n_lines},
                    {"move_distance_factor", c.planner.move_distance_factor},
                    {"joint_segment_score", c.planner.joint_segment_score},
                    {"arm",
                     {{"neck_shoulder", c.planner.arm.neck_shoulder},
                      {"upper_arm", c.planner.arm.upper_arm},
                      {"forearm", c.planner.arm.forearm},
                      {"body_offset", c.planner.arm.body_offset}}}};
  doc["sto"] = {{"n_iterations", c.sto.n_iterations},
                {"n_samples", c.sto.n_samples},
                {"noise_sigma", c.sto.noise_sigma},
                {"horizon", c.sto.horizon},
                {"u_max", c.sto.u_max},
                {"pre_grasp_margin", c.sto.pre_grasp_margin},
                {"w_distance", c.sto.weights.distance},
                {"w_push", c.sto.weights.push},
                {"w_dropped", c.sto.weights.dropped}};
  doc["train"] = {{"n_folds", c.train.n_folds},
                  {"cross_validate", c.train.cross_validate},
                  {"gamma", c.train.options.gamma},
                  {"lambda", c.train.options.lambda},
                  {"max_iterations", c.train.options.max_iterations},
                  {"max_support", c.train.options.max_support},
                  {"balance_classes", c.train.options.balance_classes},
                  {"gamma_scale", c.train.gamma_scale}};
  doc["policy"] = {{"clearance", c.policy.clearance},
                   {"corridor", c.policy.corridor},
                   {"offset_weight", c.policy.offset_weight},
                   {"participant_spread", c.policy.participant_spread},
                   {"noise", c.policy.noise},
                   {"participants", c.policy.participants},
                   {"narrow_probability", c.policy.narrow_probability}};
  return doc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, path.string() + ": " + e.what());
  }
  return run_config_from_json(doc);
}

}  // namespace hlp
