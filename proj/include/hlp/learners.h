#ifndef HLP_LEARNERS_H_
#define HLP_LEARNERS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace hlp {

enum class ModelKind { kBinary, kMulticlass8, kRegressor2 };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

inline constexpr int kNumClasses = 8;
inline constexpr int kRegressionOutputs = 2;

// Training examples for one model. Binary labels are 0/1, multiclass labels
// 0..7; regression rows use `targets` instead. `groups` names the source of
// each row (a demonstrator) for group-disjoint splits.
struct LabeledSet {
  ModelKind kind = ModelKind::kBinary;
  int arity = 0;
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::vector<std::array<double, kRegressionOutputs>> targets;
  std::vector<std::string> groups;

  std::size_t size() const { return features.size(); }
  void add(std::span<const double> x, int label, std::string group = {});
  void add(std::span<const double> x, std::array<double, kRegressionOutputs> y,
           std::string group = {});
  // Throws kArity / kDegenerateData on malformed rows.
  void check() const;
  LabeledSet subset(std::span<const std::size_t> rows) const;
};

struct TrainOptions {
  double gamma = 0.0;  // <= 0 selects 1 / arity
  double lambda = 1e-3;
  int max_iterations = 500;
  double tolerance = 1e-8;
  int max_support = 300;
  std::uint64_t seed = 0;
  bool balance_classes = true;
};

struct TrainReport {
  std::vector<double> loss_history;
  int iterations = 0;
};

double gaussian_kernel(std::span<const double> a, std::span<const double> b,
                       double gamma);

// Gaussian-kernel machine over a set of support points:
//   f_k(x) = sum_j weights(j, k) * exp(-gamma * |x - s_j|^2) + bias(k)
// Binary models squash f_0 through a logistic; multiclass models score eight
// one-vs-rest logits; regressors output f_0, f_1 directly.
class KernelModel {
 public:
  KernelModel() = default;
  KernelModel(ModelKind kind, int arity, double gamma, Eigen::MatrixXd support,
              Eigen::MatrixXd weights, Eigen::VectorXd bias);

  ModelKind kind() const { return kind_; }
  int arity() const { return arity_; }
  double gamma() const { return gamma_; }
  const Eigen::MatrixXd& support() const { return support_; }
  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& bias() const { return bias_; }
  const std::string& trained_on() const { return trained_on_; }
  void set_trained_on(std::string digest) { trained_on_ = std::move(digest); }

  // Raw outputs f_k(x). Throws kArity.
  Eigen::VectorXd decision(std::span<const double> x) const;

  double predict_proba(std::span<const double> x) const;
  std::array<double, kNumClasses> class_scores(std::span<const double> x) const;
  int predict_class(std::span<const double> x) const;
  std::array<double, kRegressionOutputs> predict_values(
      std::span<const double> x) const;

 private:
  void expect(ModelKind kind) const;

  ModelKind kind_ = ModelKind::kBinary;
  int arity_ = 0;
  double gamma_ = 1.0;
  Eigen::MatrixXd support_;  // m x arity
  Eigen::MatrixXd weights_;  // m x outputs
  Eigen::VectorXd bias_;     // outputs
  std::string trained_on_;
};

// Index of the largest score; ties resolve to the lowest index.
int argmax(std::span<const double> scores);

// L2-regularised, class-balanced kernel logistic regression fitted with
// damped Newton steps. Throws kDegenerateData for a single-class set.
KernelModel train_binary(const LabeledSet& data, const TrainOptions& options = {},
                         TrainReport* report = nullptr);

// One-vs-rest over the eight direction classes.
KernelModel train_multiclass(const LabeledSet& data,
                             const TrainOptions& options = {},
                             TrainReport* report = nullptr);

// Kernel ridge regression per output; needs at least five rows.
KernelModel train_regressor(const LabeledSet& data,
                            const TrainOptions& options = {});

KernelModel train(const LabeledSet& data, const TrainOptions& options = {});

nlohmann::json to_json(const KernelModel& model);
KernelModel model_from_json(const nlohmann::json& doc);
void save_model(const KernelModel& model, const std::filesystem::path& path);
// Throws kIo when unreadable, kFormatVersion when malformed or truncated.
KernelModel load_model(const std::filesystem::path& path);

// Fraction of rows predicted correctly (binary threshold 0.5, multiclass
// argmax). For regressors, the root-mean-square error over both outputs.
double evaluate(const KernelModel& model, const LabeledSet& data);

// Group-disjoint folds: groups sorted by name and dealt round-robin.
std::vector<std::vector<std::size_t>> group_folds(const LabeledSet& data,
                                                  int n_folds);

struct CrossValidationResult {
  double gamma = 0.0;
  double lambda = 0.0;
  double score = 0.0;  // mean held-out accuracy, or negated RMSE
};

// Grid search over gamma multipliers {0.5, 1, 2, 4, 8, 16} of 1/arity and
// lambda in {1e-3, 1e-4, 1e-5, 1e-6} with group-disjoint folds.
CrossValidationResult cross_validate(const LabeledSet& data, int n_folds,
                                     const TrainOptions& base = {});

}  // namespace hlp

#endif  // HLP_LEARNERS_H_
