#include "hlp/learners.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "hlp/digest.h"
#include "hlp/error.h"

namespace hlp {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "hlp-kernel-model";
// Logit given to classes never seen in training.
constexpr double kAbsentClassBias = -30.0;

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }
double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kBinary: return "binary";
    case ModelKind::kMulticlass8: return "multiclass8";
    case ModelKind::kRegressor2: return "regressor2";
  }
  return "binary";
}

ModelKind model_kind_from_string(std::string_view name) {
  if (name == "binary") return ModelKind::kBinary;
  if (name == "multiclass8") return ModelKind::kMulticlass8;
  if (name == "regressor2") return ModelKind::kRegressor2;
  throw Error(ErrorCode::kFormatVersion, "unknown model kind '" + std::string(name) + "'");
}

void LabeledSet::add(std::span<const double> x, int label, std::string group) {
  features.emplace_back(x.begin(), x.end());
  labels.push_back(label);
  groups.push_back(std::move(group));
}

void LabeledSet::add(std::span<const double> x,
                     std::array<double, kRegressionOutputs> y, std::string group) {
  features.emplace_back(x.begin(), x.end());
  targets.push_back(y);
  groups.push_back(std::move(group));
}

void LabeledSet::check() const {
  if (arity <= 0) throw Error(ErrorCode::kArity, "labeled set without arity");
  for (const auto& row : features) {
    if (static_cast<int>(row.size()) != arity) {
      throw Error(ErrorCode::kArity, "row of arity " + std::to_string(row.size()) +
                                         ", expected " + std::to_string(arity));
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kDegenerateData, "non-finite feature");
    }
  }
  if (kind == ModelKind::kRegressor2) {
    if (targets.size() != features.size()) {
      throw Error(ErrorCode::kDegenerateData, "targets and features differ in length");
    }
    for (const auto& t : targets) {
      if (!std::isfinite(t[0]) || !std::isfinite(t[1])) {
        throw Error(ErrorCode::kDegenerateData, "non-finite target");
      }
    }
    return;
  }
  if (labels.size() != features.size()) {
    throw Error(ErrorCode::kDegenerateData, "labels and features differ in length");
  }
  const int n_classes = kind == ModelKind::kBinary ? 2 : kNumClasses;
  for (int y : labels) {
    if (y < 0 || y >= n_classes) {
      throw Error(ErrorCode::kDegenerateData, "label " + std::to_string(y) + " out of range");
    }
  }
}

LabeledSet LabeledSet::subset(std::span<const std::size_t> rows) const {
  LabeledSet out;
  out.kind = kind;
  out.arity = arity;
  for (std::size_t r : rows) {
    out.features.push_back(features[r]);
    if (!labels.empty()) out.labels.push_back(labels[r]);
    if (!targets.empty()) out.targets.push_back(targets[r]);
    out.groups.push_back(groups.empty() ? std::string() : groups[r]);
  }
  return out;
}

double gaussian_kernel(std::span<const double> a, std::span<const double> b,
                       double gamma) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::exp(-gamma * sq);
}

KernelModel::KernelModel(ModelKind kind, int arity, double gamma,
                         Eigen::MatrixXd support, Eigen::MatrixXd weights,
                         Eigen::VectorXd bias)
    : kind_(kind),
      arity_(arity),
      gamma_(gamma),
      support_(std::move(support)),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {}

Eigen::VectorXd KernelModel::decision(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != arity_) {
    throw Error(ErrorCode::kArity, "input of arity " + std::to_string(x.size()) +
                                       ", model expects " + std::to_string(arity_));
  }
  Eigen::VectorXd out = bias_;
  const Eigen::Index m = support_.rows();
  for (Eigen::Index j = 0; j < m; ++j) {
    double sq = 0.0;
    for (int i = 0; i < arity_; ++i) {
      const double d = x[i] - support_(j, i);
      sq += d * d;
    }
    const double k = std::exp(-gamma_ * sq);
    out += k * weights_.row(j).transpose();
  }
  return out;
}

void KernelModel::expect(ModelKind kind) const {
  if (kind_ != kind) {
    throw Error(ErrorCode::kArity, "model is " + std::string(to_string(kind_)) +
                                       ", not " + std::string(to_string(kind)));
  }
}

double KernelModel::predict_proba(std::span<const double> x) const {
  expect(ModelKind::kBinary);
  // Keep the probability strictly inside (0, 1).
  return std::clamp(sigmoid(decision(x)(0)), 1e-15, 1.0 - 1e-15);
}

std::array<double, kNumClasses> KernelModel::class_scores(
    std::span<const double> x) const {
  expect(ModelKind::kMulticlass8);
  const Eigen::VectorXd f = decision(x);
  std::array<double, kNumClasses> s{};
  for (int k = 0; k < kNumClasses; ++k) s[k] = f(k);
  return s;
}

int KernelModel::predict_class(std::span<const double> x) const {
  const auto s = class_scores(x);
  return argmax(s);
}

std::array<double, kRegressionOutputs> KernelModel::predict_values(
    std::span<const double> x) const {
  expect(ModelKind::kRegressor2);
  const Eigen::VectorXd f = decision(x);
  return {f(0), f(1)};
}

int argmax(std::span<const double> scores) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(scores.size()); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

namespace {

// Support points: the distinct rows in first-occurrence order, thinned to
// max_support by a seeded shuffle.
Eigen::MatrixXd select_support(const LabeledSet& data, int max_support,
                               std::uint64_t seed) {
  std::set<std::vector<double>> seen;
  std::vector<std::size_t> unique_rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (seen.insert(data.features[i]).second) unique_rows.push_back(i);
  }
  if (max_support > 0 && unique_rows.size() > static_cast<std::size_t>(max_support)) {
    std::mt19937_64 rng(seed);
    std::shuffle(unique_rows.begin(), unique_rows.end(), rng);
    unique_rows.resize(max_support);
    std::sort(unique_rows.begin(), unique_rows.end());
  }
  Eigen::MatrixXd support(unique_rows.size(), data.arity);
  for (std::size_t j = 0; j < unique_rows.size(); ++j) {
    for (int i = 0; i < data.arity; ++i) support(j, i) = data.features[unique_rows[j]][i];
  }
  return support;
}

Eigen::MatrixXd kernel_matrix(const LabeledSet& data, const Eigen::MatrixXd& support,
                              double gamma) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index m = support.rows();
  Eigen::MatrixXd k(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& x = data.features[r];
    for (Eigen::Index j = 0; j < m; ++j) {
      double sq = 0.0;
      for (Eigen::Index i = 0; i < support.cols(); ++i) {
        const double d = x[i] - support(j, i);
        sq += d * d;
      }
      k(r, j) = std::exp(-gamma * sq);
    }
  }
  return k;
}

Eigen::MatrixXd support_gram(const Eigen::MatrixXd& support, double gamma) {
  const Eigen::Index m = support.rows();
  Eigen::MatrixXd g(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    g(a, a) = 1.0;
    for (Eigen::Index b = a + 1; b < m; ++b) {
      const double v = std::exp(-gamma * (support.row(a) - support.row(b)).squaredNorm());
      g(a, b) = v;
      g(b, a) = v;
    }
  }
  return g;
}

double resolve_gamma(const TrainOptions& options, int arity) {
  return options.gamma > 0.0 ? options.gamma : 1.0 / arity;
}

struct LogisticFit {
  Eigen::VectorXd w;
  double b = 0.0;
};

// Newton iterations with Armijo backtracking on the weighted logistic loss
// sum_i c_i softplus(-s_i f_i) + lambda/2 w' G w.
LogisticFit fit_logistic(const Eigen::MatrixXd& k, const Eigen::MatrixXd& gram,
                         const Eigen::VectorXd& y, const Eigen::VectorXd& c,
                         const TrainOptions& options, TrainReport* report) {
  const Eigen::Index n = k.rows();
  const Eigen::Index m = k.cols();
  LogisticFit fit{Eigen::VectorXd::Zero(m), 0.0};

  auto loss_at = [&](const Eigen::VectorXd& w, double b, Eigen::VectorXd* f_out) {
    Eigen::VectorXd f = k * w;
    f.array() += b;
    double loss = 0.5 * options.lambda * w.dot(gram * w);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = y(i) > 0.5 ? 1.0 : -1.0;
      loss += c(i) * softplus(-s * f(i));
    }
    if (f_out) *f_out = std::move(f);
    return loss;
  };

  Eigen::VectorXd f;
  double loss = loss_at(fit.w, fit.b, &f);
  if (report) report->loss_history = {loss};
  const double jitter = 1e-10;
  for (int it = 0; it < options.max_iterations; ++it) {
    if (!std::isfinite(loss)) throw Error(ErrorCode::kNonFiniteLoss, "logistic loss diverged");
    Eigen::VectorXd p(n), d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i) = sigmoid(f(i));
      d(i) = c(i) * p(i) * (1.0 - p(i));
    }
    const Eigen::VectorXd r = c.cwiseProduct(p - y);
    Eigen::VectorXd grad(m + 1);
    grad.head(m) = k.transpose() * r + options.lambda * (gram * fit.w);
    grad(m) = r.sum();

    Eigen::MatrixXd h(m + 1, m + 1);
    const Eigen::MatrixXd dk = d.asDiagonal() * k;
    h.topLeftCorner(m, m) = k.transpose() * dk + options.lambda * gram;
    const Eigen::VectorXd kd = dk.colwise().sum().transpose();
    h.topRightCorner(m, 1) = kd;
    h.bottomLeftCorner(1, m) = kd.transpose();
    h(m, m) = d.sum();
    const double scale = std::max(h.diagonal().maxCoeff(), 1e-12);
    h.diagonal().array() += jitter * scale;
    const Eigen::VectorXd step = -h.ldlt().solve(grad);
    if (!step.allFinite()) throw Error(ErrorCode::kNonFiniteLoss, "Newton step is not finite");

    const double slope = grad.dot(step);
    double t = 1.0;
    double next_loss = loss;
    Eigen::VectorXd next_w, next_f;
    double next_b = fit.b;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      next_w = fit.w + t * step.head(m);
      next_b = fit.b + t * step(m);
      next_loss = loss_at(next_w, next_b, &next_f);
      if (next_loss <= loss + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted || next_loss > loss) break;
    const double delta = loss - next_loss;
    fit.w = std::move(next_w);
    fit.b = next_b;
    f = std::move(next_f);
    loss = next_loss;
    if (report) {
      report->loss_history.push_back(loss);
      report->iterations = it + 1;
    }
    if (delta < options.tolerance) break;
  }
  if (!std::isfinite(loss)) throw Error(ErrorCode::kNonFiniteLoss, "logistic loss diverged");
  return fit;
}

Eigen::VectorXd example_weights(const std::vector<int>& positive, bool balance) {
  const Eigen::Index n = static_cast<Eigen::Index>(positive.size());
  const double n_pos = static_cast<double>(std::count(positive.begin(), positive.end(), 1));
  const double n_neg = static_cast<double>(n) - n_pos;
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i) = balance ? 0.5 / (positive[i] ? n_pos : n_neg) : 1.0 / static_cast<double>(n);
  }
  return c;
}

std::string data_digest(const LabeledSet& data) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(data.kind) << ' ' << data.arity << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features[i]) os << v << ' ';
    if (!data.labels.empty()) os << '|' << data.labels[i];
    if (!data.targets.empty()) os << '|' << data.targets[i][0] << ' ' << data.targets[i][1];
    os << '\n';
  }
  return sha256_hex(os.str());
}

}  // namespace

KernelModel train_binary(const LabeledSet& data, const TrainOptions& options,
                         TrainReport* report) {
  if (data.kind != ModelKind::kBinary) {
    throw Error(ErrorCode::kArity, "train_binary needs a binary labeled set");
  }
  data.check();
  const auto n_pos = std::count(data.labels.begin(), data.labels.end(), 1);
  if (n_pos == 0 || n_pos == static_cast<long>(data.size())) {
    throw Error(ErrorCode::kDegenerateData, "binary training set has a single class");
  }
  const double gamma = resolve_gamma(options, data.arity);
  Eigen::MatrixXd support = select_support(data, options.max_support, options.seed);
  const Eigen::MatrixXd k = kernel_matrix(data, support, gamma);
  const Eigen::MatrixXd gram = support_gram(support, gamma);
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) y(i) = data.labels[i];
  const LogisticFit fit = fit_logistic(
      k, gram, y, example_weights(data.labels, options.balance_classes), options, report);
  KernelModel model(ModelKind::kBinary, data.arity, gamma, std::move(support), fit.w,
                    Eigen::VectorXd::Constant(1, fit.b));
  model.set_trained_on(data_digest(data));
  return model;
}

KernelModel train_multiclass(const LabeledSet& data, const TrainOptions& options,
                             TrainReport* report) {
  if (data.kind != ModelKind::kMulticlass8) {
    throw Error(ErrorCode::kArity, "train_multiclass needs a multiclass labeled set");
  }
  data.check();
  std::set<int> observed(data.labels.begin(), data.labels.end());
  if (observed.size() < 2) {
    throw Error(ErrorCode::kDegenerateData, "multiclass training set has fewer than two classes");
  }
  const double gamma = resolve_gamma(options, data.arity);
  Eigen::MatrixXd support = select_support(data, options.max_support, options.seed);
  const Eigen::MatrixXd k = kernel_matrix(data, support, gamma);
  const Eigen::MatrixXd gram = support_gram(support, gamma);
  const Eigen::Index m = support.rows();
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(m, kNumClasses);
  Eigen::VectorXd bias = Eigen::VectorXd::Constant(kNumClasses, kAbsentClassBias);
  for (int cls = 0; cls < kNumClasses; ++cls) {
    if (!observed.count(cls)) continue;
    std::vector<int> positive(data.size());
    Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
      positive[i] = data.labels[i] == cls ? 1 : 0;
      y(i) = positive[i];
    }
    TrainReport sub;
    const LogisticFit fit = fit_logistic(
        k, gram, y, example_weights(positive, options.balance_classes), options, &sub);
    weights.col(cls) = fit.w;
    bias(cls) = fit.b;
    if (report) {
      report->iterations += sub.iterations;
      report->loss_history.insert(report->loss_history.end(), sub.loss_history.begin(),
                                  sub.loss_history.end());
    }
  }
  KernelModel model(ModelKind::kMulticlass8, data.arity, gamma, std::move(support),
                    std::move(weights), std::move(bias));
  model.set_trained_on(data_digest(data));
  return model;
}

KernelModel train_regressor(const LabeledSet& data, const TrainOptions& options) {
  if (data.kind != ModelKind::kRegressor2) {
    throw Error(ErrorCode::kArity, "train_regressor needs a regression set");
  }
  data.check();
  if (data.size() < 5) {
    throw Error(ErrorCode::kDegenerateData, "regression needs at least five rows");
  }
  const double gamma = resolve_gamma(options, data.arity);
  Eigen::MatrixXd support = select_support(data, options.max_support, options.seed);
  const Eigen::MatrixXd k = kernel_matrix(data, support, gamma);
  const Eigen::MatrixXd gram = support_gram(support, gamma);
  const Eigen::Index n = k.rows();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::MatrixXd y(n, kRegressionOutputs);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i, 0) = data.targets[i][0];
    y(i, 1) = data.targets[i][1];
  }
  // The unpenalised bias is eliminated by centring: b = mean(y) - mean(K) W.
  const Eigen::RowVectorXd k_mean = k.colwise().mean();
  const Eigen::RowVectorXd y_mean = y.colwise().mean();
  const Eigen::MatrixXd kc = k.rowwise() - k_mean;
  const Eigen::MatrixXd yc = y.rowwise() - y_mean;
  Eigen::MatrixXd a = inv_n * (kc.transpose() * kc) + options.lambda * gram;
  const double scale = std::max(a.diagonal().maxCoeff(), 1e-12);
  a.diagonal().array() += 1e-10 * scale;
  const Eigen::MatrixXd rhs = inv_n * (kc.transpose() * yc);
  Eigen::MatrixXd w = a.ldlt().solve(rhs);
  if (!w.allFinite()) throw Error(ErrorCode::kNonFiniteLoss, "ridge solve failed");
  const Eigen::VectorXd bias = (y_mean - k_mean * w).transpose();
  KernelModel model(ModelKind::kRegressor2, data.arity, gamma, std::move(support),
                    std::move(w), bias);
  model.set_trained_on(data_digest(data));
  return model;
}

KernelModel train(const LabeledSet& data, const TrainOptions& options) {
  switch (data.kind) {
    case ModelKind::kBinary: return train_binary(data, options);
    case ModelKind::kMulticlass8: return train_multiclass(data, options);
    case ModelKind::kRegressor2: return train_regressor(data, options);
  }
  throw Error(ErrorCode::kArity, "unknown model kind");
}

json to_json(const KernelModel& model) {
  json support = json::array();
  for (Eigen::Index j = 0; j < model.support().rows(); ++j) {
    std::vector<double> row(model.support().cols());
    for (Eigen::Index i = 0; i < model.support().cols(); ++i) row[i] = model.support()(j, i);
    support.push_back(row);
  }
  json weights = json::array();
  for (Eigen::Index j = 0; j < model.weights().rows(); ++j) {
    std::vector<double> row(model.weights().cols());
    for (Eigen::Index i = 0; i < model.weights().cols(); ++i) row[i] = model.weights()(j, i);
    weights.push_back(row);
  }
  return {{"format", kFormatName},
          {"version", kFormatVersion},
          {"kind", to_string(model.kind())},
          {"feature_arity", model.arity()},
          {"gamma", model.gamma()},
          {"bias", std::vector<double>(model.bias().data(),
                                       model.bias().data() + model.bias().size())},
          {"support_points", support},
          {"weights", weights},
          {"trained_on", model.trained_on()}};
}

KernelModel model_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormatName ||
        doc.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::kFormatVersion, "unsupported model format or version");
    }
    const ModelKind kind = model_kind_from_string(doc.at("kind").get<std::string>());
    const int arity = doc.at("feature_arity").get<int>();
    const auto bias_v = doc.at("bias").get<std::vector<double>>();
    const auto support_v = doc.at("support_points").get<std::vector<std::vector<double>>>();
    const auto weights_v = doc.at("weights").get<std::vector<std::vector<double>>>();
    const int outputs = kind == ModelKind::kBinary ? 1
                        : kind == ModelKind::kMulticlass8 ? kNumClasses
                                                          : kRegressionOutputs;
    if (static_cast<int>(bias_v.size()) != outputs || support_v.size() != weights_v.size() ||
        arity <= 0) {
      throw Error(ErrorCode::kFormatVersion, "inconsistent model dimensions");
    }
    Eigen::MatrixXd support(support_v.size(), arity);
    Eigen::MatrixXd weights(weights_v.size(), outputs);
    for (std::size_t j = 0; j < support_v.size(); ++j) {
      if (static_cast<int>(support_v[j].size()) != arity ||
          static_cast<int>(weights_v[j].size()) != outputs) {
        throw Error(ErrorCode::kFormatVersion, "ragged model matrices");
      }
      for (int i = 0; i < arity; ++i) support(j, i) = support_v[j][i];
      for (int i = 0; i < outputs; ++i) weights(j, i) = weights_v[j][i];
    }
    Eigen::VectorXd bias = Eigen::Map<const Eigen::VectorXd>(bias_v.data(), outputs);
    const double gamma = doc.at("gamma").get<double>();
    if (!(gamma > 0.0)) throw Error(ErrorCode::kFormatVersion, "non-positive bandwidth");
    KernelModel model(kind, arity, gamma, std::move(support), std::move(weights),
                      std::move(bias));
    model.set_trained_on(doc.value("trained_on", std::string()));
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatVersion, std::string("malformed model: ") + e.what());
  }
}

void save_model(const KernelModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << to_json(model).dump() << "\n";
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

KernelModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatVersion, path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

double evaluate(const KernelModel& model, const LabeledSet& data) {
  if (data.size() == 0) return 0.0;
  if (model.kind() == ModelKind::kRegressor2) {
    double sq = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto p = model.predict_values(data.features[i]);
      sq += std::pow(p[0] - data.targets[i][0], 2) + std::pow(p[1] - data.targets[i][1], 2);
    }
    return std::sqrt(sq / (2.0 * static_cast<double>(data.size())));
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int predicted = model.kind() == ModelKind::kBinary
                              ? (model.predict_proba(data.features[i]) > 0.5 ? 1 : 0)
                              : model.predict_class(data.features[i]);
    if (predicted == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::vector<std::vector<std::size_t>> group_folds(const LabeledSet& data, int n_folds) {
  std::map<std::string, int> group_index;
  for (const auto& g : data.groups) group_index.emplace(g, 0);
  int next = 0;
  for (auto& [name, idx] : group_index) idx = next++;
  std::vector<std::vector<std::size_t>> folds(n_folds);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::string& g = data.groups.empty() ? std::string() : data.groups[i];
    folds[group_index[g] % n_folds].push_back(i);
  }
  return folds;
}

CrossValidationResult cross_validate(const LabeledSet& data, int n_folds,
                                     const TrainOptions& base) {
  const auto folds = group_folds(data, n_folds);
  CrossValidationResult best{0.0, 0.0, -std::numeric_limits<double>::infinity()};
  for (double g_mult : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    for (double lambda : {1e-3, 1e-4, 1e-5, 1e-6}) {
      TrainOptions opt = base;
      opt.gamma = g_mult / data.arity;
      opt.lambda = lambda;
      double total = 0.0;
      int used = 0;
      for (const auto& held : folds) {
        if (held.empty() || held.size() == data.size()) continue;
        std::vector<char> is_held(data.size(), 0);
        for (std::size_t r : held) is_held[r] = 1;
        std::vector<std::size_t> train_rows;
        for (std::size_t r = 0; r < data.size(); ++r) {
          if (!is_held[r]) train_rows.push_back(r);
        }
        try {
          const KernelModel m = train(data.subset(train_rows), opt);
          const double s = evaluate(m, data.subset(held));
          total += data.kind == ModelKind::kRegressor2 ? -s : s;
          ++used;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDegenerateData) throw;
        }
      }
      if (used == 0) continue;
      const double score = total / used;
      if (score > best.score) best = {opt.gamma, lambda, score};
    }
  }
  if (!std::isfinite(best.score)) {
    throw Error(ErrorCode::kDegenerateData, "no fold could be trained");
  }
  return best;
}

}  // namespace hlp
