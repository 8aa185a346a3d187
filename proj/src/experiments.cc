#include "hlp/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <unistd.h>

#include "hlp/digest.h"
#include "hlp/error.h"
#include "hlp/scene_gen.h"
#include "hlp/svg.h"

namespace hlp {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// ---- training --------------------------------------------------------------

const ModelReport& TrainResult::report(std::string_view name) const {
  for (const ModelReport& r : reports) {
    if (r.name == name) return r;
  }
  throw Error(ErrorCode::kSchemaError, "no report for model " + std::string(name));
}

TrainResult train_models(const std::vector<Demonstration>& demos, const TrainConfig& cfg) {
  const TrainingBundle bundle = build_training_bundle(demos, cfg.bundle);
  TrainResult result;
  struct Item {
    const char* name;
    const LabeledSet* data;
    KernelModel* model;
  };
  const std::array<Item, 5> items = {{{"gap", &bundle.gap_set, &result.models.gap},
                                      {"object", &bundle.object_set, &result.models.object},
                                      {"direction", &bundle.direction_set, &result.models.direction},
                                      {"segment", &bundle.segment_set, &result.models.segment},
                                      {"arm", &bundle.arm_set, &result.models.arm}}};
  for (const Item& item : items) {
    const LabeledSet& data = *item.data;
    if (data.size() == 0) {
      throw Error(ErrorCode::kEmptyBundle, std::string("no rows for the ") + item.name + " model");
    }
    TrainOptions opt = cfg.options;
    if (opt.gamma <= 0.0) opt.gamma = cfg.gamma_scale / data.arity;
    if (cfg.cross_validate && cfg.n_folds >= 2) {
      const CrossValidationResult cv = cross_validate(data, cfg.n_folds, opt);
      opt.gamma = cv.gamma;
      opt.lambda = cv.lambda;
    }
    ModelReport report;
    report.name = item.name;
    report.rows = data.size();
    report.lambda = opt.lambda;
    report.gamma = opt.gamma;

    if (cfg.n_folds >= 2) {
      const auto folds = group_folds(data, cfg.n_folds);
      double sum = 0.0;
      for (const auto& test : folds) {
        if (test.empty()) continue;
        std::vector<char> in_test(data.size(), 0);
        for (std::size_t i : test) in_test[i] = 1;
        std::vector<std::size_t> train_rows;
        for (std::size_t i = 0; i < data.size(); ++i) {
          if (!in_test[i]) train_rows.push_back(i);
        }
        if (train_rows.empty()) continue;
        try {
          const KernelModel m = train(data.subset(train_rows), opt);
          sum += evaluate(m, data.subset(test));
          ++report.folds_used;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDegenerateData) throw;
        }
      }
      if (report.folds_used > 0) report.held_out = sum / report.folds_used;
    }
    *item.model = train(data, opt);
    result.reports.push_back(report);
  }
  return result;
}

json to_json(const TrainResult& result) {
  json models = json::array();
  for (const ModelReport& r : result.reports) {
    const bool regressor = r.name == "arm";
    models.push_back({{"name", r.name},
                      {"rows", r.rows},
                      {"gamma", r.gamma},
                      {"lambda", r.lambda},
                      {"folds", r.folds_used},
                      {regressor ? "held_out_rmse" : "held_out_accuracy", r.held_out}});
  }
  return {{"format", "hlp-train-report"}, {"version", 1}, {"models", models}};
}

ModelSet synthetic_models(int n_demos, std::uint64_t seed, const TrainConfig& cfg) {
  TrainConfig c = cfg;
  c.n_folds = 0;
  c.cross_validate = false;
  return train_models(generate_synthetic_demos(n_demos, seed), c).models;
}

// ---- similarity ------------------------------------------------------------

std::vector<RowAction> reference_actions(const Demonstration& demo) {
  if (!demo.ground_truth.empty()) return demo.ground_truth;
  std::vector<RowAction> out;
  for (const StateActionPair& p : segment_demonstration(demo)) out.push_back(p.action);
  return out;
}

SimilaritySummary summarize(const std::vector<SimilarityTrial>& trials, int fold) {
  SimilaritySummary s;
  s.fold = fold;
  std::vector<double> scores;
  double action = 0.0;
  double element = 0.0;
  for (const SimilarityTrial& t : trials) {
    if (fold >= 0 && t.fold != fold) continue;
    scores.push_back(t.similarity.score);
    action += t.similarity.action_match;
    element += t.similarity.element_match;
  }
  s.n = static_cast<int>(scores.size());
  if (s.n == 0) return s;
  s.mean = mean_of(scores);
  s.std = std_of(scores);
  s.action_match = action / s.n;
  s.element_match = element / s.n;
  return s;
}

namespace {

SimilarityTrial score_demo(const Demonstration& demo, const ModelSet& models,
                           const PlannerConfig& planner, int fold) {
  SimilarityTrial t;
  t.fold = fold;
  t.source = demo.source;
  t.trial = demo.trial;
  const std::vector<RowAction> reference = reference_actions(demo);
  try {
    const Plan p = plan(demo.scene, models, planner);
    t.similarity = similarity(p.actions(), reference);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kRowMismatch) throw;
    t.error = e.what();
  }
  return t;
}

void finish(SimilarityEvaluation& eval, int n_folds) {
  for (int f = 0; f < n_folds; ++f) eval.folds.push_back(summarize(eval.trials, f));
  eval.overall = summarize(eval.trials, -1);
}

}  // namespace

SimilarityEvaluation evaluate_similarity(const std::vector<Demonstration>& demos,
                                         const ModelSet& models, const PlannerConfig& planner) {
  SimilarityEvaluation eval;
  for (const Demonstration& d : demos) eval.trials.push_back(score_demo(d, models, planner, 0));
  finish(eval, 1);
  return eval;
}

SimilarityEvaluation cross_validate_similarity(const std::vector<Demonstration>& demos,
                                               int n_folds, const TrainConfig& train,
                                               const PlannerConfig& planner) {
  if (n_folds < 2) throw Error(ErrorCode::kSchemaError, "need at least two folds");
  std::set<std::string> sources;
  for (const Demonstration& d : demos) sources.insert(d.source);
  std::map<std::string, int> fold_of;
  int i = 0;
  for (const std::string& s : sources) fold_of[s] = i++ % n_folds;

  TrainConfig inner = train;
  inner.n_folds = 0;
  SimilarityEvaluation eval;
  for (int f = 0; f < n_folds; ++f) {
    std::vector<Demonstration> train_demos;
    std::vector<const Demonstration*> test_demos;
    for (const Demonstration& d : demos) {
      if (fold_of[d.source] == f) test_demos.push_back(&d);
      else train_demos.push_back(d);
    }
    if (test_demos.empty() || train_demos.empty()) continue;
    const ModelSet models = train_models(train_demos, inner).models;
    for (const Demonstration* d : test_demos) {
      eval.trials.push_back(score_demo(*d, models, planner, f));
    }
  }
  finish(eval, n_folds);
  return eval;
}

void write_similarity_csv(const SimilarityEvaluation& eval, std::ostream& out) {
  out << "fold,source,trial,score,action_match,element_match,error\n";
  for (const SimilarityTrial& t : eval.trials) {
    std::string err = t.error;
    std::replace(err.begin(), err.end(), ',', ';');
    out << t.fold << ',' << t.source << ',' << t.trial << ',' << fixed(t.similarity.score) << ','
        << fixed(t.similarity.action_match) << ',' << fixed(t.similarity.element_match) << ','
        << err << '\n';
  }
}

namespace {

json summary_json(const SimilaritySummary& s) {
  return {{"fold", s.fold},
          {"n", s.n},
          {"mean", s.mean},
          {"std", s.std},
          {"action_match", s.action_match},
          {"element_match", s.element_match}};
}

}  // namespace

json to_json(const SimilarityEvaluation& eval) {
  json folds = json::array();
  for (const SimilaritySummary& s : eval.folds) folds.push_back(summary_json(s));
  int failures = 0;
  for (const SimilarityTrial& t : eval.trials) failures += t.error.empty() ? 0 : 1;
  return {{"format", "hlp-similarity-summary"},
          {"version", 1},
          {"overall", summary_json(eval.overall)},
          {"folds", folds},
          {"planner_failures", failures}};
}

// ---- benchmark -------------------------------------------------------------

std::vector<BenchRow> run_bench(const std::vector<BenchScene>& scenes, const ModelSet& models,
                                const BenchOptions& options) {
  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const BenchScene& bs = scenes[i];
    const WorldState state = initial_state(bs.scene);
    STOConfig sto = options.sto;
    sto.seed = options.sto.seed + i;

    BenchRow hlp;
    hlp.scene_id = bs.id;
    hlp.method = "HLP";
    hlp.n_objects = static_cast<int>(bs.scene.objects.size());
    hlp.seed = sto.seed;
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const Plan p = plan(bs.scene, models, options.planner);
      const ControlSequence init = hlp_init(p, state, sto);
      hlp.init_s = seconds_since(t0);
      const OptimizeResult r = optimize(state, init, sto);
      hlp.opt_s = r.opt_s;
      hlp.success = r.result.success;
    } catch (const Error& e) {
      hlp.error = e.what();
      if (options.log) *options.log << bs.id << " HLP: " << e.what() << '\n';
    }
    hlp.total_s = hlp.init_s + hlp.opt_s;

    BenchRow base;
    base.scene_id = bs.id;
    base.method = "STO";
    base.n_objects = hlp.n_objects;
    base.seed = sto.seed;
    {
      const auto t0 = std::chrono::steady_clock::now();
      const ControlSequence init = straight_line_init(state, sto);
      base.init_s = seconds_since(t0);
      const OptimizeResult r = optimize(state, init, sto);
      base.opt_s = r.opt_s;
      base.success = r.result.success;
    }
    base.total_s = base.init_s + base.opt_s;

    for (BenchRow* row : {&hlp, &base}) {
      if (options.mask_timings) row->init_s = row->opt_s = row->total_s = 0.0;
      rows.push_back(*row);
    }
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "scene_id,method,success,init_s,opt_s,total_s,n_objects,seed\n";
  for (const BenchRow& r : rows) {
    out << r.scene_id << ',' << r.method << ',' << (r.success ? 1 : 0) << ','
        << fixed(r.init_s, 6) << ',' << fixed(r.opt_s, 6) << ',' << fixed(r.total_s, 6) << ','
        << r.n_objects << ',' << r.seed << '\n';
  }
}

std::vector<BenchAggregate> aggregate(const std::vector<BenchRow>& rows) {
  std::map<std::pair<int, std::string>, std::vector<const BenchRow*>> groups;
  for (const BenchRow& r : rows) groups[{r.n_objects, r.method}].push_back(&r);
  std::vector<BenchAggregate> out;
  for (const auto& [key, members] : groups) {
    BenchAggregate a;
    a.n_objects = key.first;
    a.method = key.second;
    a.trials = static_cast<int>(members.size());
    std::vector<double> init, opt, total;
    for (const BenchRow* r : members) {
      if (!r->success) continue;
      ++a.successes;
      init.push_back(r->init_s);
      opt.push_back(r->opt_s);
      total.push_back(r->total_s);
    }
    a.success_rate = a.trials ? static_cast<double>(a.successes) / a.trials : 0.0;
    a.median_init_s = median(init);
    a.median_opt_s = median(opt);
    a.median_total_s = median(total);
    a.mean_init_s = mean_of(init);
    a.mean_opt_s = mean_of(opt);
    a.mean_total_s = mean_of(total);
    out.push_back(a);
  }
  return out;
}

json to_json(const std::vector<BenchAggregate>& aggregates) {
  json groups = json::array();
  for (const BenchAggregate& a : aggregates) {
    groups.push_back({{"method", a.method},
                      {"n_objects", a.n_objects},
                      {"trials", a.trials},
                      {"successes", a.successes},
                      {"success_rate", a.success_rate},
                      {"median_init_s", a.median_init_s},
                      {"median_opt_s", a.median_opt_s},
                      {"median_total_s", a.median_total_s},
                      {"mean_init_s", a.mean_init_s},
                      {"mean_opt_s", a.mean_opt_s},
                      {"mean_total_s", a.mean_total_s}});
  }
  return {{"format", "hlp-bench-summary"}, {"version", 1}, {"groups", groups}};
}

// ---- reproduction suites ---------------------------------------------------

bool ReproReport::pass() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const CriterionResult& c) { return c.pass; });
}

namespace {

const BenchAggregate& find_aggregate(const std::vector<BenchAggregate>& aggs,
                                     std::string_view method, int n_objects) {
  for (const BenchAggregate& a : aggs) {
    if (a.method == method && (n_objects < 0 || a.n_objects == n_objects)) return a;
  }
  throw Error(ErrorCode::kThresholdFailure, "no " + std::string(method) + " results");
}

// Pools aggregates across object counts for one method.
BenchAggregate pooled(const std::vector<BenchRow>& rows, std::string_view method) {
  std::vector<BenchRow> same;
  for (BenchRow r : rows) {
    if (r.method != method) continue;
    r.n_objects = 0;
    same.push_back(r);
  }
  const auto aggs = aggregate(same);
  if (aggs.empty()) throw Error(ErrorCode::kThresholdFailure, "no " + std::string(method) + " results");
  return aggs.front();
}

std::string criteria_markdown(const std::vector<CriterionResult>& criteria) {
  std::ostringstream s;
  s << "| criterion | result | detail |\n|---|---|---|\n";
  for (const CriterionResult& c : criteria) {
    s << "| " << c.name << " | " << (c.pass ? "pass" : "FAIL") << " | " << c.detail << " |\n";
  }
  return s.str();
}

std::string bench_markdown(const std::vector<BenchAggregate>& aggs) {
  std::ostringstream s;
  s << "| method | objects | success | median init s | median opt s | median total s |\n"
    << "|---|---|---|---|---|---|\n";
  for (const BenchAggregate& a : aggs) {
    s << "| " << a.method << " | " << (a.n_objects > 0 ? std::to_string(a.n_objects) : "all")
      << " | " << a.successes << "/" << a.trials
      << " | " << fixed(a.median_init_s) << " | " << fixed(a.median_opt_s) << " | "
      << fixed(a.median_total_s) << " |\n";
  }
  return s.str();
}

ModelSet repro_models(const ReproOptions& o) {
  if (!o.models_dir.empty()) return load_models(o.models_dir);
  return synthetic_models(o.demos, o.seed);
}

std::vector<BenchScene> label(const std::vector<Scene>& scenes, const std::string& prefix) {
  std::vector<BenchScene> out;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    std::ostringstream id;
    id << prefix << std::setw(4) << std::setfill('0') << i;
    out.push_back({id.str(), scenes[i]});
  }
  return out;
}

ReproReport repro_similarity(const ReproOptions& o) {
  ReproReport rep;
  rep.suite = "vr_similarity";
  const std::vector<Demonstration> demos = generate_synthetic_demos(o.demos, o.seed);
  TrainConfig cfg;
  cfg.n_folds = o.folds;
  const TrainResult trained = train_models(demos, cfg);
  const SimilarityEvaluation eval = cross_validate_similarity(demos, o.folds, cfg);

  const double gap_acc = trained.report("gap").held_out;
  const double obj_acc = trained.report("object").held_out;
  rep.criteria.push_back({"gap classifier held-out accuracy >= 0.90", gap_acc >= 0.90, fixed(gap_acc)});
  rep.criteria.push_back({"object classifier held-out accuracy >= 0.85", obj_acc >= 0.85, fixed(obj_acc)});
  rep.criteria.push_back({"mean s_HLP >= 0.70", eval.overall.mean >= 0.70, fixed(eval.overall.mean)});

  std::vector<double> means, actions, elements;
  for (const SimilaritySummary& f : eval.folds) {
    if (f.n == 0) continue;
    means.push_back(f.mean);
    actions.push_back(f.action_match);
    elements.push_back(f.element_match);
  }
  std::ostringstream md;
  md << "# vr_similarity\n\n" << o.demos << " synthetic demonstrations, " << o.folds
     << " source-disjoint folds, seed " << o.seed << ".\n\n"
     << "| measure | mean | std |\n|---|---|---|\n"
     << "| gap classifier accuracy | " << fixed(gap_acc) << " | |\n"
     << "| object classifier accuracy | " << fixed(obj_acc) << " | |\n"
     << "| s_HLP overall | " << fixed(mean_of(means)) << " | " << fixed(std_of(means)) << " |\n"
     << "| same action | " << fixed(mean_of(actions)) << " | " << fixed(std_of(actions)) << " |\n"
     << "| same element | " << fixed(mean_of(elements)) << " | " << fixed(std_of(elements))
     << " |\n\n"
     << criteria_markdown(rep.criteria);
  rep.markdown = md.str();
  std::ostringstream csv;
  write_similarity_csv(eval, csv);
  rep.csv = csv.str();
  return rep;
}

// Timing criteria are judged on measured times; masked reports print zeros.
std::vector<BenchRow> zero_timings(std::vector<BenchRow> rows) {
  for (BenchRow& r : rows) r.init_s = r.opt_s = r.total_s = 0.0;
  return rows;
}

ReproReport repro_gen1(const ReproOptions& o) {
  ReproReport rep;
  rep.suite = "gen1";
  const ModelSet models = repro_models(o);
  BenchOptions bo;
  bo.sto.seed = o.seed;
  const auto rows = run_bench(label(generalisation_one(o.scenes, o.seed), "g1-"), models, bo);
  const BenchAggregate h = pooled(rows, "HLP");
  const BenchAggregate s = pooled(rows, "STO");
  rep.criteria.push_back({"HLP success >= STO success - 5 points",
                          h.success_rate >= s.success_rate - 0.05,
                          fixed(h.success_rate, 2) + " vs " + fixed(s.success_rate, 2)});
  rep.criteria.push_back({"median HLP opt time <= 0.5 x median STO opt time",
                          h.successes > 0 && s.successes > 0 &&
                              h.median_opt_s <= 0.5 * s.median_opt_s,
                          o.mask_timings ? "masked"
                                         : fixed(h.median_opt_s, 5) + " vs " + fixed(s.median_opt_s, 5)});
  const auto shown = o.mask_timings ? zero_timings(rows) : rows;
  std::ostringstream md;
  md << "# gen1\n\n" << o.scenes << " two-row scenes with varied table and object sizes, seed "
     << o.seed << ".\n\n"
     << bench_markdown({pooled(shown, "HLP"), pooled(shown, "STO")}) << '\n'
     << criteria_markdown(rep.criteria);
  rep.markdown = md.str();
  std::ostringstream csv;
  write_bench_csv(shown, csv);
  rep.csv = csv.str();
  return rep;
}

ReproReport repro_gen2(const ReproOptions& o) {
  ReproReport rep;
  rep.suite = "gen2";
  const ModelSet models = repro_models(o);
  std::vector<BenchRow> rows;
  for (int n : {5, 7, 9}) {
    BenchOptions bo;
    bo.sto.seed = o.seed + static_cast<std::uint64_t>(n) * 1000;
    const auto scenes = label(generalisation_two(o.scenes, n, o.seed + n),
                              "g2-" + std::to_string(n) + "-");
    const auto part = run_bench(scenes, models, bo);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const auto aggs = aggregate(rows);
  const double h5 = find_aggregate(aggs, "HLP", 5).mean_init_s;
  const double h9 = find_aggregate(aggs, "HLP", 9).mean_init_s;
  const double ratio = std::max(h5, h9) / std::max(1e-12, std::min(h5, h9));
  rep.criteria.push_back({"HLP init time 9 vs 5 objects within 2x", h5 > 0 && h9 > 0 && ratio <= 2.0,
                          o.mask_timings ? "masked" : "ratio " + fixed(ratio, 3)});
  const double s5 = find_aggregate(aggs, "STO", 5).mean_total_s;
  const double s7 = find_aggregate(aggs, "STO", 7).mean_total_s;
  const double s9 = find_aggregate(aggs, "STO", 9).mean_total_s;
  rep.criteria.push_back({"STO total time grows with object count", s5 < s7 && s7 < s9,
                          o.mask_timings ? "masked"
                                         : fixed(s5, 5) + " / " + fixed(s7, 5) + " / " + fixed(s9, 5)});
  for (int n : {5, 7, 9}) {
    const double hs = find_aggregate(aggs, "HLP", n).success_rate;
    const double ss = find_aggregate(aggs, "STO", n).success_rate;
    rep.criteria.push_back({"success rates within 10 points at " + std::to_string(n) + " objects",
                            std::abs(hs - ss) <= 0.10 + 1e-12,
                            fixed(hs, 2) + " vs " + fixed(ss, 2)});
  }
  const auto shown = o.mask_timings ? zero_timings(rows) : rows;
  std::ostringstream md;
  md << "# gen2\n\n" << o.scenes << " scenes per object count, boxes and cylinders, start and"
     << " target not aligned, seed " << o.seed << ".\n\n"
     << bench_markdown(aggregate(shown)) << '\n'
     << criteria_markdown(rep.criteria);
  rep.markdown = md.str();
  std::ostringstream csv;
  write_bench_csv(shown, csv);
  rep.csv = csv.str();
  return rep;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << text;
}

}  // namespace

ReproReport run_repro(std::string_view suite, const ReproOptions& options) {
  ReproReport rep;
  if (suite == "vr_similarity") rep = repro_similarity(options);
  else if (suite == "gen1") rep = repro_gen1(options);
  else if (suite == "gen2") rep = repro_gen2(options);
  else throw Error(ErrorCode::kSchemaError, "unknown suite " + std::string(suite));
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    write_text(options.out_dir / (rep.suite + ".md"), rep.markdown);
    write_text(options.out_dir / (rep.suite + ".csv"), rep.csv);
  }
  return rep;
}

// ---- golden fixtures -------------------------------------------------------

namespace {

constexpr const char* kFixtureInputs[] = {"scene.json", "demos.jsonl"};

// Regenerates every fixture output into `out`; returns relative names.
std::vector<std::string> regenerate(const std::filesystem::path& dir,
                                    const std::filesystem::path& out) {
  std::filesystem::create_directories(out / "models");
  const std::vector<Demonstration> demos = load_demos_jsonl(dir / "demos.jsonl");
  TrainConfig cfg;
  cfg.n_folds = 0;
  const ModelSet models = train_models(demos, cfg).models;
  save_models(models, out / "models");
  const Scene scene = load_scene_file(dir / "scene.json");
  const Plan p = plan(scene, models);
  write_text(out / "plan.json", to_json(p, true).dump(2) + "\n");
  write_text(out / "plan.svg", render_svg(scene, &p));
  return {"models/gap.json", "models/object.json", "models/direction.json",
          "models/segment.json", "models/arm.json", "plan.json", "plan.svg"};
}

std::filesystem::path scratch_dir() {
  return std::filesystem::temp_directory_path() /
         ("hlp-fixture-" + std::to_string(static_cast<long>(::getpid())));
}

}  // namespace

void bless_fixtures(const std::filesystem::path& dir) {
  const std::filesystem::path tmp = scratch_dir();
  std::filesystem::remove_all(tmp);
  json inputs = json::object();
  for (const char* name : kFixtureInputs) inputs[name] = file_sha256(dir / name);
  json outputs = json::object();
  for (const std::string& name : regenerate(dir, tmp)) {
    outputs[name] = file_sha256(tmp / name);
  }
  std::filesystem::remove_all(tmp);
  const json manifest = {{"format", "hlp-fixture-manifest"},
                         {"version", 1},
                         {"tolerance", "exact: sha256 of the regenerated bytes"},
                         {"inputs", inputs},
                         {"outputs", outputs}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

void verify_fixtures(const std::filesystem::path& dir) {
  std::ifstream f(dir / "manifest.json");
  if (!f) throw Error(ErrorCode::kIo, "no manifest in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatVersion, std::string("manifest: ") + e.what());
  }
  if (manifest.value("format", "") != "hlp-fixture-manifest" || manifest.value("version", 0) != 1) {
    throw Error(ErrorCode::kFormatVersion, "not a version 1 fixture manifest");
  }
  std::vector<FixtureMismatch> bad;
  for (const auto& [name, digest] : manifest.at("inputs").items()) {
    const std::string actual = file_sha256(dir / name);
    if (actual != digest.get<std::string>()) bad.push_back({name, digest, actual});
  }
  const std::filesystem::path tmp = scratch_dir();
  std::filesystem::remove_all(tmp);
  if (bad.empty()) {
    regenerate(dir, tmp);
    for (const auto& [name, digest] : manifest.at("outputs").items()) {
      const std::string actual =
          std::filesystem::exists(tmp / name) ? file_sha256(tmp / name) : std::string("missing");
      if (actual != digest.get<std::string>()) bad.push_back({name, digest, actual});
    }
  }
  std::filesystem::remove_all(tmp);
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << bad.size() << " fixture digest mismatch(es):";
    for (const FixtureMismatch& m : bad) {
      msg << ' ' << m.file << " expected " << m.expected.substr(0, 12) << " got "
          << m.actual.substr(0, 12) << ';';
    }
    throw Error(ErrorCode::kThresholdFailure, msg.str());
  }
}

}  // namespace hlp
