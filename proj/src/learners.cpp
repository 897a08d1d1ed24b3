#include "coldstart/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace coldstart {
namespace {

constexpr double kTinyProb = 1e-300;

// Dense dot with an implicit trailing 1 for the bias column.
double dot_aug(const double* w, std::span<const float> x) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    s += w[j] * static_cast<double>(x[j]);
  }
  return s + w[x.size()];
}

void axpy_aug(double* w, double coef, std::span<const float> x) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    w[j] += coef * static_cast<double>(x[j]);
  }
  w[x.size()] += coef;
}

}  // namespace

void Learner::check_dim(std::span<const float> x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument("learner: got " + std::to_string(x.size()) +
                                " features, expected " + std::to_string(dim_));
  }
}

void Learner::fit_batch(const std::vector<LabeledExample>& history, int epochs,
                        bool reset) {
  if (epochs < 1) {
    throw std::invalid_argument("fit_batch: epochs must be >= 1");
  }
  if (reset) restore_initial();
  if (history.empty()) return;
  std::vector<std::size_t> order(history.size());
  std::iota(order.begin(), order.end(), 0);
  for (int e = 0; e < epochs; ++e) {
    rng_.shuffle(order);
    for (std::size_t i : order) {
      observe(history[i].features, history[i].label);
    }
  }
}

ProbVector UniformLearner::predict_proba(std::span<const float> x) const {
  check_dim(x);
  return uniform_prob(classes_);
}

void UniformLearner::observe(std::span<const float> x, int /*y*/) {
  check_dim(x);
}

PerceptronLearner::PerceptronLearner(int feature_dim, int classes,
                                     double learning_rate, Rng rng)
    : Learner(feature_dim, classes, rng),
      w_(static_cast<std::size_t>(classes) * (feature_dim + 1), 0.0),
      lr_(learning_rate) {
  if (learning_rate <= 0.0) {
    throw std::invalid_argument("perceptron: learning rate must be positive");
  }
}

std::vector<double> PerceptronLearner::scores(std::span<const float> x) const {
  std::vector<double> s(static_cast<std::size_t>(classes_));
  for (int c = 0; c < classes_; ++c) {
    s[c] = dot_aug(&w_[static_cast<std::size_t>(c) * (dim_ + 1)], x);
  }
  return s;
}

ProbVector PerceptronLearner::predict_proba(std::span<const float> x) const {
  check_dim(x);
  std::vector<double> s = scores(x);
  softmax_inplace(s);
  return s;
}

int PerceptronLearner::own_argmax(std::span<const float> x) const {
  std::vector<double> s = scores(x);
  return static_cast<int>(
      std::max_element(s.begin(), s.end()) - s.begin());
}

void PerceptronLearner::update_on_mistake(std::span<const float> x, int y,
                                          int predicted) {
  if (predicted == y) return;
  axpy_aug(&w_[static_cast<std::size_t>(y) * (dim_ + 1)], lr_, x);
  axpy_aug(&w_[static_cast<std::size_t>(predicted) * (dim_ + 1)], -lr_, x);
}

void PerceptronLearner::observe(std::span<const float> x, int y) {
  check_dim(x);
  update_on_mistake(x, y, own_argmax(x));
}

void PerceptronLearner::observe_with_prediction(std::span<const float> x,
                                                int y, int predicted) {
  check_dim(x);
  update_on_mistake(x, y, predicted);
}

void PerceptronLearner::restore_initial() {
  std::fill(w_.begin(), w_.end(), 0.0);
}

KnnLearner::KnnLearner(int feature_dim, int classes, int k, double epsilon,
                       Rng rng)
    : Learner(feature_dim, classes, rng), k_(k), epsilon_(epsilon) {
  if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
  if (epsilon <= 0.0) throw std::invalid_argument("knn: epsilon must be > 0");
}

ProbVector KnnLearner::predict_proba(std::span<const float> x) const {
  check_dim(x);
  if (ys_.empty()) return uniform_prob(classes_);

  std::vector<std::pair<double, std::size_t>> by_dist(xs_.size());
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    const std::vector<float>& r = xs_[i];
    double d2 = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double diff = static_cast<double>(r[j]) - static_cast<double>(x[j]);
      d2 += diff * diff;
    }
    by_dist[i] = {d2, i};
  }
  const std::size_t use = std::min<std::size_t>(k_, by_dist.size());
  // Pair ordering keeps equidistant neighbors in insertion order.
  std::partial_sort(by_dist.begin(), by_dist.begin() + use, by_dist.end());

  ProbVector votes(static_cast<std::size_t>(classes_), 0.0);
  for (std::size_t i = 0; i < use; ++i) {
    const double dist = std::sqrt(by_dist[i].first);
    votes[ys_[by_dist[i].second]] += 1.0 / (dist + epsilon_);
  }
  double total = 0.0;
  for (double v : votes) total += v;
  for (double& v : votes) v /= total;
  return votes;
}

void KnnLearner::observe(std::span<const float> x, int y) {
  check_dim(x);
  xs_.emplace_back(x.begin(), x.end());
  ys_.push_back(y);
}

void KnnLearner::fit_batch(const std::vector<LabeledExample>& history,
                           int /*epochs*/, bool /*reset*/) {
  // Instance store, so "training" mirrors the revealed history exactly;
  // repeated passes would only duplicate reference points.
  xs_.clear();
  ys_.clear();
  for (const LabeledExample& ex : history) observe(ex.features, ex.label);
}

void KnnLearner::restore_initial() {
  xs_.clear();
  ys_.clear();
}

SoftmaxHeadLearner::SoftmaxHeadLearner(int feature_dim, int classes,
                                       double learning_rate, Rng rng,
                                       double init_scale)
    : Learner(feature_dim, classes, rng),
      w_(static_cast<std::size_t>(classes) * (feature_dim + 1), 0.0),
      lr_(learning_rate) {
  if (learning_rate <= 0.0) {
    throw std::invalid_argument("softmax_head: learning rate must be positive");
  }
  if (init_scale > 0.0) {
    for (double& v : w_) v = init_scale * rng_.normal();
  }
  w_init_ = w_;
}

ProbVector SoftmaxHeadLearner::predict_proba(std::span<const float> x) const {
  check_dim(x);
  std::vector<double> s(static_cast<std::size_t>(classes_));
  for (int c = 0; c < classes_; ++c) {
    s[c] = dot_aug(&w_[static_cast<std::size_t>(c) * (dim_ + 1)], x);
  }
  softmax_inplace(s);
  return s;
}

void SoftmaxHeadLearner::observe(std::span<const float> x, int y) {
  const ProbVector p = predict_proba(x);
  for (int c = 0; c < classes_; ++c) {
    const double coef = lr_ * ((c == y ? 1.0 : 0.0) - p[c]);
    axpy_aug(&w_[static_cast<std::size_t>(c) * (dim_ + 1)], coef, x);
  }
}

double SoftmaxHeadLearner::loss(std::span<const float> x, int y) const {
  const ProbVector p = predict_proba(x);
  return -std::log(std::max(p[y], kTinyProb));
}

std::vector<double> SoftmaxHeadLearner::loss_gradient(std::span<const float> x,
                                                      int y) const {
  const ProbVector p = predict_proba(x);
  std::vector<double> g(w_.size(), 0.0);
  for (int c = 0; c < classes_; ++c) {
    const double coef = p[c] - (c == y ? 1.0 : 0.0);
    double* row = &g[static_cast<std::size_t>(c) * (dim_ + 1)];
    for (int j = 0; j < dim_; ++j) {
      row[j] = coef * static_cast<double>(x[j]);
    }
    row[dim_] = coef;
  }
  return g;
}

void SoftmaxHeadLearner::restore_initial() { w_ = w_init_; }

MlpLearner::MlpLearner(int feature_dim, int hidden, int classes,
                       double learning_rate, Rng rng)
    : Learner(feature_dim, classes, rng),
      hidden_(hidden),
      w1_(static_cast<std::size_t>(hidden) * (feature_dim + 1), 0.0),
      w2_(static_cast<std::size_t>(classes) * (hidden + 1), 0.0),
      lr_(learning_rate) {
  if (hidden < 1) throw std::invalid_argument("mlp: hidden width must be >= 1");
  if (learning_rate <= 0.0) {
    throw std::invalid_argument("mlp: learning rate must be positive");
  }
  // Symmetric uniform init on the hidden weights breaks unit symmetry; the
  // zero output layer keeps the cold prediction exactly uniform.
  const double limit = std::sqrt(6.0 / (feature_dim + hidden));
  for (int h = 0; h < hidden_; ++h) {
    double* row = &w1_[static_cast<std::size_t>(h) * (dim_ + 1)];
    for (int j = 0; j < dim_; ++j) {
      row[j] = limit * (2.0 * rng_.uniform_real() - 1.0);
    }
    row[dim_] = 0.0;
  }
  w1_init_ = w1_;
  w2_init_ = w2_;
}

void MlpLearner::forward(std::span<const float> x, std::vector<double>& z1,
                         std::vector<double>& a1,
                         std::vector<double>& p) const {
  z1.resize(static_cast<std::size_t>(hidden_));
  a1.resize(static_cast<std::size_t>(hidden_));
  for (int h = 0; h < hidden_; ++h) {
    z1[h] = dot_aug(&w1_[static_cast<std::size_t>(h) * (dim_ + 1)], x);
    a1[h] = z1[h] > 0.0 ? z1[h] : 0.0;
  }
  p.resize(static_cast<std::size_t>(classes_));
  for (int c = 0; c < classes_; ++c) {
    const double* row = &w2_[static_cast<std::size_t>(c) * (hidden_ + 1)];
    double s = 0.0;
    for (int h = 0; h < hidden_; ++h) s += row[h] * a1[h];
    p[c] = s + row[hidden_];
  }
  softmax_inplace(p);
}

ProbVector MlpLearner::predict_proba(std::span<const float> x) const {
  check_dim(x);
  std::vector<double> z1, a1, p;
  forward(x, z1, a1, p);
  return p;
}

void MlpLearner::observe(std::span<const float> x, int y) {
  check_dim(x);
  std::vector<double> z1, a1, p;
  forward(x, z1, a1, p);

  std::vector<double> delta2(p);
  delta2[y] -= 1.0;

  // Backprop through the pre-update output weights.
  std::vector<double> delta1(static_cast<std::size_t>(hidden_), 0.0);
  for (int h = 0; h < hidden_; ++h) {
    if (z1[h] <= 0.0) continue;
    double s = 0.0;
    for (int c = 0; c < classes_; ++c) {
      s += delta2[c] * w2_[static_cast<std::size_t>(c) * (hidden_ + 1) + h];
    }
    delta1[h] = s;
  }

  for (int c = 0; c < classes_; ++c) {
    double* row = &w2_[static_cast<std::size_t>(c) * (hidden_ + 1)];
    const double coef = lr_ * delta2[c];
    for (int h = 0; h < hidden_; ++h) row[h] -= coef * a1[h];
    row[hidden_] -= coef;
  }
  for (int h = 0; h < hidden_; ++h) {
    if (delta1[h] == 0.0) continue;
    axpy_aug(&w1_[static_cast<std::size_t>(h) * (dim_ + 1)], -lr_ * delta1[h],
             x);
  }
}

double MlpLearner::loss(std::span<const float> x, int y) const {
  check_dim(x);
  std::vector<double> z1, a1, p;
  forward(x, z1, a1, p);
  return -std::log(std::max(p[y], kTinyProb));
}

std::vector<double> MlpLearner::loss_gradient(std::span<const float> x,
                                              int y) const {
  check_dim(x);
  std::vector<double> z1, a1, p;
  forward(x, z1, a1, p);

  std::vector<double> delta2(p);
  delta2[y] -= 1.0;

  std::vector<double> g(w1_.size() + w2_.size(), 0.0);
  double* g1 = g.data();
  double* g2 = g.data() + w1_.size();

  for (int c = 0; c < classes_; ++c) {
    double* row = &g2[static_cast<std::size_t>(c) * (hidden_ + 1)];
    for (int h = 0; h < hidden_; ++h) row[h] = delta2[c] * a1[h];
    row[hidden_] = delta2[c];
  }
  for (int h = 0; h < hidden_; ++h) {
    if (z1[h] <= 0.0) continue;
    double s = 0.0;
    for (int c = 0; c < classes_; ++c) {
      s += delta2[c] * w2_[static_cast<std::size_t>(c) * (hidden_ + 1) + h];
    }
    double* row = &g1[static_cast<std::size_t>(h) * (dim_ + 1)];
    for (int j = 0; j < dim_; ++j) row[j] = s * static_cast<double>(x[j]);
    row[dim_] = s;
  }
  return g;
}

std::vector<double> MlpLearner::parameters() const {
  std::vector<double> flat;
  flat.reserve(w1_.size() + w2_.size());
  flat.insert(flat.end(), w1_.begin(), w1_.end());
  flat.insert(flat.end(), w2_.begin(), w2_.end());
  return flat;
}

void MlpLearner::set_parameters(const std::vector<double>& flat) {
  if (flat.size() != w1_.size() + w2_.size()) {
    throw std::invalid_argument("mlp: parameter vector has wrong length");
  }
  std::copy(flat.begin(), flat.begin() + w1_.size(), w1_.begin());
  std::copy(flat.begin() + w1_.size(), flat.end(), w2_.begin());
}

void MlpLearner::restore_initial() {
  w1_ = w1_init_;
  w2_ = w2_init_;
}

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, int feature_dim,
                                      int classes, Rng rng) {
  if (feature_dim < 1 || classes < 1) {
    throw std::invalid_argument("make_learner: bad pool dimensions");
  }
  const double lr = spec.learning_rate;
  if (spec.name == "uniform") {
    return std::make_unique<UniformLearner>(feature_dim, classes, rng);
  }
  if (spec.name == "perceptron") {
    return std::make_unique<PerceptronLearner>(feature_dim, classes,
                                               lr > 0.0 ? lr : 1.0, rng);
  }
  if (spec.name == "knn") {
    return std::make_unique<KnnLearner>(feature_dim, classes, spec.knn_k,
                                        spec.knn_epsilon, rng);
  }
  if (spec.name == "softmax_head" || spec.name == "softmax") {
    return std::make_unique<SoftmaxHeadLearner>(feature_dim, classes,
                                                lr > 0.0 ? lr : 0.1, rng);
  }
  if (spec.name == "mlp") {
    return std::make_unique<MlpLearner>(feature_dim, spec.hidden, classes,
                                        lr > 0.0 ? lr : 0.01, rng);
  }
  throw std::invalid_argument("make_learner: unknown learner '" + spec.name +
                              "'");
}

}  // namespace coldstart
