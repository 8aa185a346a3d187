// hlp: scene generation, synthetic demonstrations, training, planning,
// evaluation, benchmarking and rendering.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hlp/config.h"
#include "hlp/demos.h"
#include "hlp/error.h"
#include "hlp/experiments.h"
#include "hlp/planner.h"
#include "hlp/scene.h"
#include "hlp/scene_gen.h"
#include "hlp/svg.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string config;
  std::string out = ".";
  bool mask_timings = false;
};

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw hlp::Error(hlp::ErrorCode::kIo, "cannot write " + path.string());
  f << text;
  if (!f) throw hlp::Error(hlp::ErrorCode::kIo, "write failed: " + path.string());
}

std::uint64_t require_seed(const Globals& g, const hlp::RunConfig& cfg, const char* command) {
  if (g.seed_given) return g.seed;
  if (cfg.seed) return *cfg.seed;
  throw hlp::Error(hlp::ErrorCode::kSchemaError, std::string(command) + " needs --seed");
}

std::uint64_t seed_or_zero(const Globals& g, const hlp::RunConfig& cfg) {
  if (g.seed_given) return g.seed;
  return cfg.seed.value_or(0);
}

fs::path pick(const std::string& flag, const fs::path& from_config, const char* what) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  throw hlp::Error(hlp::ErrorCode::kSchemaError, std::string("missing ") + what);
}

std::vector<fs::path> scene_files(const fs::path& where) {
  if (!fs::exists(where)) throw hlp::Error(hlp::ErrorCode::kIo, where.string() + " does not exist");
  if (fs::is_regular_file(where)) return {where};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(where)) {
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw hlp::Error(hlp::ErrorCode::kIo, "no scene files in " + where.string());
  return out;
}

std::vector<hlp::Demonstration> load_demos(const fs::path& path, std::ostream& log) {
  if (fs::is_directory(path)) {
    hlp::VrLoadReport r = hlp::load_vr_dataset(path);
    for (const auto& [file, reason] : r.skipped) log << "skipped " << file << ": " << reason << '\n';
    return std::move(r.demos);
  }
  return hlp::load_demos_jsonl(path);
}

std::string scene_name(std::size_t i) {
  std::ostringstream s;
  s << "scene_" << std::setw(4) << std::setfill('0') << i << ".json";
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human-like high-level planning for reaching through clutter"};
  app.require_subcommand(1);
  Globals g;
  app.add_option_function<std::uint64_t>(
         "--seed", [&](const std::uint64_t& s) { g.seed = s; g.seed_given = true; }, "RNG seed")
      ->trigger_on_parse();
  app.add_option("--config", g.config, "RunConfig JSON file");
  app.add_option("--out", g.out, "output directory");
  app.add_flag("--mask-timings", g.mask_timings, "write zero timings for byte-stable output");

  // scene-gen
  auto* gen = app.add_subcommand("scene-gen", "generate scenes");
  int rows = 2, per_row = 3, count = 1, n_random = 0;
  std::vector<double> table_dims;
  std::vector<std::string> shapes{"box"};
  std::string mode = "rows";
  double narrow = 0.6;
  gen->add_option("--rows", rows, "number of rows")->check(CLI::PositiveNumber);
  gen->add_option("--objects-per-row", per_row, "objects in each row")->check(CLI::PositiveNumber);
  gen->add_option("--n-objects-random", n_random,
                  "total objects, split over two rows with un-aligned start and target")
      ->check(CLI::PositiveNumber);
  gen->add_option("--count", count, "number of scenes")->check(CLI::PositiveNumber);
  gen->add_option("--table", table_dims, "table width and depth, m")->expected(2);
  gen->add_option("--shapes", shapes, "box and/or cylinder")->delimiter(',');
  gen->add_option("--mode", mode, "rows | gen1")->check(CLI::IsMember({"rows", "gen1"}));
  gen->add_option("--narrow-probability", narrow, "chance of a narrow inner gap")
      ->check(CLI::Range(0.0, 1.0));

  // synth-demos
  auto* synth = app.add_subcommand("synth-demos", "scripted demonstrations");
  int n_demos = 200;
  int participants = 0;
  std::string demo_format = "jsonl";
  synth->add_option("--n", n_demos, "number of demonstrations")->check(CLI::PositiveNumber);
  synth->add_option("--participants", participants, "scripted demonstrators")
      ->check(CLI::PositiveNumber);
  synth->add_option("--format", demo_format, "jsonl | vr")->check(CLI::IsMember({"jsonl", "vr"}));

  // train
  auto* trn = app.add_subcommand("train", "fit the five models");
  std::string demos_path;
  bool do_cv = false;
  int folds = -1;
  trn->add_option("--demos", demos_path, "demos.jsonl or a VR dataset directory");
  trn->add_flag("--cross-validate", do_cv, "grid-search gamma and lambda per model");
  trn->add_option("--folds", folds, "source-disjoint folds for the report");

  // plan
  auto* pln = app.add_subcommand("plan", "plan one scene");
  std::string scene_path, models_path;
  bool svg = false;
  pln->add_option("--scene", scene_path, "scene JSON")->required();
  pln->add_option("--models", models_path, "model directory");
  pln->add_flag("--svg", svg, "also write plan.svg");

  // eval-similarity
  auto* evs = app.add_subcommand("eval-similarity", "compare plans with demonstrations");
  std::string plans_dir;
  int eval_folds = 0;
  evs->add_option("--demos", demos_path, "reference demonstrations");
  evs->add_option("--models", models_path, "fixed model directory");
  evs->add_option("--plans", plans_dir, "directory of <source>-<trial>.json plan documents");
  evs->add_option("--folds", eval_folds, "train per source-disjoint fold instead of fixed models");

  // bench
  auto* bch = app.add_subcommand("bench", "HLP-initialised vs straight-line optimisation");
  std::string scenes_path;
  bch->add_option("--scenes", scenes_path, "scene file or directory");
  bch->add_option("--models", models_path, "model directory");

  // render
  auto* rnd = app.add_subcommand("render", "SVG of a scene, optionally with its plan");
  rnd->add_option("--scene", scene_path, "scene JSON")->required();
  rnd->add_option("--models", models_path, "plan with these models");

  // repro
  auto* rep = app.add_subcommand("repro", "run a reproduction suite");
  std::string suite;
  std::string scale = "ci";
  rep->add_option("--suite", suite, "vr_similarity | gen1 | gen2")
      ->required()
      ->check(CLI::IsMember({"vr_similarity", "gen1", "gen2"}));
  rep->add_option("--scale", scale, "ci | full")->check(CLI::IsMember({"ci", "full"}));
  rep->add_option("--models", models_path, "model directory (trained when absent)");

  // fixtures
  auto* bless = app.add_subcommand("bless", "record golden fixture digests");
  auto* verify = app.add_subcommand("verify", "check golden fixture digests");
  std::string fixtures;
  bless->add_option("--fixtures", fixtures, "fixture directory")->required();
  verify->add_option("--fixtures", fixtures, "fixture directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const hlp::RunConfig cfg = g.config.empty() ? hlp::RunConfig{} : hlp::load_run_config(g.config);
    const fs::path out = g.out != "." || cfg.paths.output.empty() ? fs::path(g.out) : cfg.paths.output;

    if (*gen) {
      const std::uint64_t seed = require_seed(g, cfg, "scene-gen");
      std::vector<hlp::Scene> scenes;
      if (n_random > 0) {
        scenes = hlp::generalisation_two(count, n_random, seed);
      } else if (mode == "gen1") {
        scenes = hlp::generalisation_one(count, seed);
      } else {
        hlp::SceneGenOptions o;
        if (!table_dims.empty()) {
          o.table_w = table_dims[0];
          o.table_h = table_dims[1];
        }
        o.objects_per_row.assign(static_cast<std::size_t>(rows), per_row);
        o.boxes = std::count(shapes.begin(), shapes.end(), "box") > 0;
        o.cylinders = std::count(shapes.begin(), shapes.end(), "cylinder") > 0;
        if (!o.boxes && !o.cylinders) {
          throw hlp::Error(hlp::ErrorCode::kSchemaError, "--shapes needs box or cylinder");
        }
        o.narrow_probability = narrow;
        std::mt19937_64 rng(seed);
        for (int i = 0; i < count; ++i) scenes.push_back(hlp::generate_scene(rng, o));
      }
      for (std::size_t i = 0; i < scenes.size(); ++i) {
        const json doc = hlp::to_json(scenes[i]);
        hlp::load_scene(doc);  // self-check
        write_file(out / scene_name(i), doc.dump(2) + "\n");
      }
      std::cout << "wrote " << scenes.size() << " scene(s) to " << out.string() << '\n';
    } else if (*synth) {
      const std::uint64_t seed = require_seed(g, cfg, "synth-demos");
      hlp::PolicyParams p = cfg.policy;
      if (participants > 0) p.participants = participants;
      const auto demos = hlp::generate_synthetic_demos(n_demos, seed, p);
      if (demo_format == "vr") {
        for (const auto& d : demos) hlp::write_vr_trial(d, out / "vr");
        std::cout << "wrote " << demos.size() << " trials under " << (out / "vr").string() << '\n';
      } else {
        fs::create_directories(out);
        hlp::save_demos_jsonl(demos, out / "demos.jsonl");
        std::cout << "wrote " << demos.size() << " demos to " << (out / "demos.jsonl").string()
                  << '\n';
      }
    } else if (*trn) {
      const auto demos = load_demos(pick(demos_path, cfg.paths.demos, "--demos"), std::cerr);
      hlp::TrainConfig tc = cfg.train;
      tc.cross_validate = tc.cross_validate || do_cv;
      if (folds >= 0) tc.n_folds = folds;
      tc.options.seed = seed_or_zero(g, cfg);
      tc.bundle.alpha = cfg.planner.alpha;
      tc.bundle.n_lines = cfg.planner.n_lines;
      tc.bundle.arm = cfg.planner.arm;
      const hlp::TrainResult r = hlp::train_models(demos, tc);
      hlp::save_models(r.models, out / "models");
      write_file(out / "train_report.json", hlp::to_json(r).dump(2) + "\n");
      for (const auto& m : r.reports) {
        std::cout << m.name << ": " << m.rows << " rows, held-out "
                  << (m.name == "arm" ? "rmse " : "accuracy ") << m.held_out << '\n';
      }
    } else if (*pln) {
      const hlp::Scene scene = hlp::load_scene_file(scene_path);
      const hlp::ModelSet models = hlp::load_models(pick(models_path, cfg.paths.models, "--models"));
      const hlp::Plan p = hlp::plan(scene, models, cfg.planner);
      write_file(out / "plan.json", hlp::to_json(p, g.mask_timings).dump(2) + "\n");
      if (svg) write_file(out / "plan.svg", hlp::render_svg(scene, &p));
      std::cout << "plan with " << p.keypoints.size() << " keypoints, rho_zeta " << p.rho_zeta
                << '\n';
    } else if (*evs) {
      const auto demos = load_demos(pick(demos_path, cfg.paths.demos, "--demos"), std::cerr);
      hlp::SimilarityEvaluation eval;
      if (!plans_dir.empty()) {
        for (const auto& d : demos) {
          const fs::path file = fs::path(plans_dir) / (d.source + "-" + d.trial + ".json");
          std::ifstream f(file);
          if (!f) throw hlp::Error(hlp::ErrorCode::kIo, "missing plan " + file.string());
          hlp::SimilarityTrial t;
          t.source = d.source;
          t.trial = d.trial;
          t.similarity = hlp::similarity(hlp::plan_actions_from_json(json::parse(f)),
                                         hlp::reference_actions(d));
          eval.trials.push_back(t);
        }
        eval.folds.push_back(hlp::summarize(eval.trials, 0));
        eval.overall = hlp::summarize(eval.trials, -1);
      } else if (eval_folds >= 2) {
        hlp::TrainConfig tc = cfg.train;
        tc.options.seed = seed_or_zero(g, cfg);
        eval = hlp::cross_validate_similarity(demos, eval_folds, tc, cfg.planner);
      } else {
        eval = hlp::evaluate_similarity(
            demos, hlp::load_models(pick(models_path, cfg.paths.models, "--models")), cfg.planner);
      }
      std::ostringstream csv;
      hlp::write_similarity_csv(eval, csv);
      write_file(out / "similarity.csv", csv.str());
      write_file(out / "similarity_summary.json", hlp::to_json(eval).dump(2) + "\n");
      std::cout << "s_HLP mean " << eval.overall.mean << " std " << eval.overall.std
                << ", action match " << eval.overall.action_match << ", element match "
                << eval.overall.element_match << '\n';
    } else if (*bch) {
      const hlp::ModelSet models = hlp::load_models(pick(models_path, cfg.paths.models, "--models"));
      std::vector<hlp::BenchScene> scenes;
      for (const fs::path& f : scene_files(pick(scenes_path, cfg.paths.scenes, "--scenes"))) {
        scenes.push_back({f.stem().string(), hlp::load_scene_file(f)});
      }
      hlp::BenchOptions bo;
      bo.planner = cfg.planner;
      bo.sto = cfg.sto;
      bo.sto.seed = seed_or_zero(g, cfg);
      bo.mask_timings = g.mask_timings;
      bo.log = &std::cerr;
      const auto rows = hlp::run_bench(scenes, models, bo);
      std::ostringstream csv;
      hlp::write_bench_csv(rows, csv);
      write_file(out / "bench.csv", csv.str());
      write_file(out / "bench_summary.json", hlp::to_json(hlp::aggregate(rows)).dump(2) + "\n");
      std::cout << "wrote " << rows.size() << " rows\n";
    } else if (*rnd) {
      const hlp::Scene scene = hlp::load_scene_file(scene_path);
      std::string text;
      if (!models_path.empty()) {
        const hlp::Plan p = hlp::plan(scene, hlp::load_models(models_path), cfg.planner);
        text = hlp::render_svg(scene, &p);
      } else {
        text = hlp::render_svg(scene);
      }
      const fs::path file = out / (fs::path(scene_path).stem().string() + ".svg");
      write_file(file, text);
      std::cout << "wrote " << file.string() << '\n';
    } else if (*rep) {
      hlp::ReproOptions o;
      o.seed = g.seed_given ? g.seed : cfg.seed.value_or(1);
      o.out_dir = out;
      o.mask_timings = g.mask_timings;
      if (!models_path.empty()) o.models_dir = models_path;
      if (scale == "ci") {
        o.scenes = 30;
        o.demos = 200;
      }
      const hlp::ReproReport r = hlp::run_repro(suite, o);
      std::cout << r.markdown;
      if (!r.pass()) {
        std::ostringstream msg;
        msg << suite << " failed:";
        for (const auto& c : r.criteria) {
          if (!c.pass) msg << ' ' << c.name << " (" << c.detail << ");";
        }
        throw hlp::Error(hlp::ErrorCode::kThresholdFailure, msg.str());
      }
    } else if (*bless) {
      hlp::bless_fixtures(fixtures);
      std::cout << "blessed " << fixtures << '\n';
    } else if (*verify) {
      hlp::verify_fixtures(fixtures);
      std::cout << "fixtures match\n";
    }
  } catch (const hlp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hlp::ExitCodeFor(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
