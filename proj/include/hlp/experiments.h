#ifndef HLP_EXPERIMENTS_H_
#define HLP_EXPERIMENTS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlp/demos.h"
#include "hlp/learners.h"
#include "hlp/planner.h"
#include "hlp/sto.h"

namespace hlp {

// ---- training --------------------------------------------------------------

// Pipeline defaults are sharper and less regularised than the bare learner
// defaults; options.gamma <= 0 means gamma_scale / arity per model.
struct TrainConfig {
  int n_folds = 5;
  bool cross_validate = false;
  double gamma_scale = 8.0;
  TrainOptions options = pipeline_options();
  BundleOptions bundle;

  static TrainOptions pipeline_options() {
    TrainOptions o;
    o.lambda = 1e-5;
    return o;
  }
};

struct ModelReport {
  std::string name;
  std::size_t rows = 0;
  double gamma = 0.0;
  double lambda = 0.0;
  // Mean over source-disjoint folds: accuracy, or RMSE for the arm regressor.
  double held_out = 0.0;
  int folds_used = 0;
};

struct TrainResult {
  ModelSet models;
  std::vector<ModelReport> reports;  // gap, object, direction, segment, arm

  const ModelReport& report(std::string_view name) const;
};

TrainResult train_models(const std::vector<Demonstration>& demos, const TrainConfig& cfg = {});
nlohmann::json to_json(const TrainResult& result);

// ---- similarity ------------------------------------------------------------

// Row actions a demonstration is judged against: its ground truth when
// present, else what segmentation recovers.
std::vector<RowAction> reference_actions(const Demonstration& demo);

struct SimilarityTrial {
  int fold = 0;
  std::string source;
  std::string trial;
  Similarity similarity;
  std::string error;  // planner failure; the trial then scores zero
};

struct SimilaritySummary {
  int fold = -1;  // -1 for the pooled summary
  int n = 0;
  double mean = 0.0;
  double std = 0.0;
  double action_match = 0.0;
  double element_match = 0.0;
};

struct SimilarityEvaluation {
  std::vector<SimilarityTrial> trials;
  std::vector<SimilaritySummary> folds;
  SimilaritySummary overall;
};

SimilaritySummary summarize(const std::vector<SimilarityTrial>& trials, int fold);

// Plans every demo's scene with fixed models.
SimilarityEvaluation evaluate_similarity(const std::vector<Demonstration>& demos,
                                         const ModelSet& models,
                                         const PlannerConfig& planner = {});

// Source-disjoint folds: models are trained without the fold's sources and
// scored on its demos.
SimilarityEvaluation cross_validate_similarity(const std::vector<Demonstration>& demos,
                                               int n_folds, const TrainConfig& train,
                                               const PlannerConfig& planner = {});

void write_similarity_csv(const SimilarityEvaluation& eval, std::ostream& out);
nlohmann::json to_json(const SimilarityEvaluation& eval);

// ---- benchmark -------------------------------------------------------------

struct BenchScene {
  std::string id;
  Scene scene;
};

struct BenchRow {
  std::string scene_id;
  std::string method;  // "HLP" or "STO"
  bool success = false;
  double init_s = 0.0;
  double opt_s = 0.0;
  double total_s = 0.0;
  int n_objects = 0;
  std::uint64_t seed = 0;
  std::string error;
};

struct BenchOptions {
  PlannerConfig planner;
  STOConfig sto;
  bool mask_timings = false;
  std::ostream* log = nullptr;  // per-scene failures
};

// Runs the HLP-initialised optimiser and the straight-line baseline on each
// scene. Rows come in scene order, HLP first.
std::vector<BenchRow> run_bench(const std::vector<BenchScene>& scenes, const ModelSet& models,
                                const BenchOptions& options = {});

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

struct BenchAggregate {
  std::string method;
  int n_objects = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  // Medians and means over successful trials.
  double median_init_s = 0.0;
  double median_opt_s = 0.0;
  double median_total_s = 0.0;
  double mean_init_s = 0.0;
  double mean_opt_s = 0.0;
  double mean_total_s = 0.0;
};

std::vector<BenchAggregate> aggregate(const std::vector<BenchRow>& rows);
nlohmann::json to_json(const std::vector<BenchAggregate>& aggregates);

double median(std::vector<double> values);

// ---- reproduction suites ---------------------------------------------------

struct ReproOptions {
  std::uint64_t seed = 1;
  int scenes = 100;  // per object count for gen2
  int demos = 500;
  int folds = 5;
  std::filesystem::path out_dir;
  std::filesystem::path models_dir;  // trained from synthetic demos when empty
  bool mask_timings = false;         // write zero timings; criteria still use the measured ones
};

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ReproReport {
  std::string suite;
  std::vector<CriterionResult> criteria;
  std::string markdown;
  std::string csv;

  bool pass() const;
};

// Suites: vr_similarity, gen1, gen2. Writes report.md and the CSV into
// out_dir when set.
ReproReport run_repro(std::string_view suite, const ReproOptions& options);

// Models trained on seeded synthetic demos.
ModelSet synthetic_models(int n_demos, std::uint64_t seed, const TrainConfig& cfg = {});

// ---- golden fixtures -------------------------------------------------------

// A fixture directory holds input documents and a manifest.json recording the
// digest of every output the fixture regenerates. Outputs are recomputed
// into a scratch directory and compared byte for byte.
void bless_fixtures(const std::filesystem::path& dir);

struct FixtureMismatch {
  std::string file;
  std::string expected;
  std::string actual;
};

// Throws kThresholdFailure listing every mismatch.
void verify_fixtures(const std::filesystem::path& dir);

}  // namespace hlp

#endif  // HLP_EXPERIMENTS_H_
