#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "coldstart/rng.hpp"
#include "coldstart/types.hpp"

namespace coldstart {

// One revealed example: a borrowed feature view plus its label.
struct LabeledExample {
  std::span<const float> features;
  std::int32_t label = 0;
};

// Common learner contract: always able to emit class probabilities (including
// with zero observed labels), able to absorb labeled examples one at a time or
// as whole-history batch fits, and able to revert to its initial parameters.
class Learner {
 public:
  Learner(int feature_dim, int classes, Rng rng)
      : dim_(feature_dim), classes_(classes), rng_(rng) {}
  virtual ~Learner() = default;

  virtual ProbVector predict_proba(std::span<const float> x) const = 0;

  // One online update. Learners that condition on the emitted prediction
  // recompute their own deterministic argmax here.
  virtual void observe(std::span<const float> x, int y) = 0;

  // Online update reusing the prediction already charged to the protocol, so
  // mistake-driven updates stay in lockstep with counted errors. Default
  // ignores the prediction.
  virtual void observe_with_prediction(std::span<const float> x, int y,
                                       int /*predicted*/) {
    observe(x, y);
  }

  // Batch-boundary fit over the labeled history revealed so far. Parametric
  // learners run `epochs` shuffled passes of their per-example update; reset
  // restores the initial trainable parameters first.
  virtual void fit_batch(const std::vector<LabeledExample>& history, int epochs,
                         bool reset);

  // Revert trainable parameters to their state at construction.
  virtual void restore_initial() = 0;

  virtual std::string name() const = 0;

  int classes() const { return classes_; }
  int feature_dim() const { return dim_; }

 protected:
  void check_dim(std::span<const float> x) const;

  int dim_;
  int classes_;
  Rng rng_;
};

// Predicts the uniform distribution forever; ignores all labels. With the
// protocol's uniform tie-breaking this realizes a uniform-random guesser.
class UniformLearner final : public Learner {
 public:
  UniformLearner(int feature_dim, int classes, Rng rng)
      : Learner(feature_dim, classes, rng) {}

  ProbVector predict_proba(std::span<const float> x) const override;
  void observe(std::span<const float> x, int /*y*/) override;
  void restore_initial() override {}
  std::string name() const override { return "uniform"; }
};

// One-vs-all mistake-driven perceptron with a bias column. Scores are turned
// into probabilities with a softmax; updates happen only on mistakes, with the
// paired promote/demote rule.
class PerceptronLearner final : public Learner {
 public:
  PerceptronLearner(int feature_dim, int classes, double learning_rate,
                    Rng rng);

  ProbVector predict_proba(std::span<const float> x) const override;
  void observe(std::span<const float> x, int y) override;
  void observe_with_prediction(std::span<const float> x, int y,
                               int predicted) override;
  void restore_initial() override;
  std::string name() const override { return "perceptron"; }

  // Row-major C x (dim + 1); last column is the bias.
  const std::vector<double>& weights() const { return w_; }
  double learning_rate() const { return lr_; }

 private:
  std::vector<double> scores(std::span<const float> x) const;
  int own_argmax(std::span<const float> x) const;
  void update_on_mistake(std::span<const float> x, int y, int predicted);

  std::vector<double> w_;
  double lr_;
};

// Distance-weighted k-nearest-neighbor voting over the accumulated reference
// examples. Empty store predicts uniform. A batch fit mirrors the labeled
// history so the store matches everything revealed so far.
class KnnLearner final : public Learner {
 public:
  KnnLearner(int feature_dim, int classes, int k, double epsilon, Rng rng);

  ProbVector predict_proba(std::span<const float> x) const override;
  void observe(std::span<const float> x, int y) override;
  void fit_batch(const std::vector<LabeledExample>& history, int epochs,
                 bool reset) override;
  void restore_initial() override;
  std::string name() const override { return "knn"; }

  std::size_t store_size() const { return ys_.size(); }
  int k() const { return k_; }

 private:
  std::vector<std::vector<float>> xs_;
  std::vector<std::int32_t> ys_;
  int k_;
  double epsilon_;
};

// Multinomial logistic-regression head trained by per-example SGD on
// cross-entropy. Weights start at zero so the cold output is exactly uniform.
class SoftmaxHeadLearner final : public Learner {
 public:
  SoftmaxHeadLearner(int feature_dim, int classes, double learning_rate,
                     Rng rng, double init_scale = 0.0);

  ProbVector predict_proba(std::span<const float> x) const override;
  void observe(std::span<const float> x, int y) override;
  void restore_initial() override;
  std::string name() const override { return "softmax_head"; }

  double loss(std::span<const float> x, int y) const;
  // d(-log p_y)/dW, row-major C x (dim + 1), evaluated at current weights.
  std::vector<double> loss_gradient(std::span<const float> x, int y) const;

  std::vector<double>& parameters() { return w_; }
  const std::vector<double>& parameters() const { return w_; }

 private:
  std::vector<double> w_;
  std::vector<double> w_init_;
  double lr_;
};

// One-hidden-layer rectifier network trained by per-example SGD on
// cross-entropy. Hidden weights get a random symmetric init from the learner
// stream; the output layer starts at zero so the cold output is uniform.
class MlpLearner final : public Learner {
 public:
  MlpLearner(int feature_dim, int hidden, int classes, double learning_rate,
             Rng rng);

  ProbVector predict_proba(std::span<const float> x) const override;
  void observe(std::span<const float> x, int y) override;
  void restore_initial() override;
  std::string name() const override { return "mlp"; }

  int hidden() const { return hidden_; }
  double loss(std::span<const float> x, int y) const;
  // Flat gradient over [W1 | W2] matching parameters().
  std::vector<double> loss_gradient(std::span<const float> x, int y) const;
  std::vector<double> parameters() const;
  void set_parameters(const std::vector<double>& flat);

 private:
  void forward(std::span<const float> x, std::vector<double>& z1,
               std::vector<double>& a1, std::vector<double>& p) const;

  int hidden_;
  std::vector<double> w1_;  // hidden x (dim + 1)
  std::vector<double> w2_;  // classes x (hidden + 1)
  std::vector<double> w1_init_;
  std::vector<double> w2_init_;
  double lr_;
};

struct LearnerSpec {
  std::string name = "perceptron";  // uniform|perceptron|knn|softmax_head|mlp
  double learning_rate = 0.0;       // 0 -> per-learner default
  int knn_k = 7;
  double knn_epsilon = 1e-8;
  int hidden = 128;
  int epochs_per_batch = 1;
};

// Builds a freshly initialized learner. All stochastic initialization draws
// come from `rng`, which the learner keeps for batch-fit shuffling.
std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, int feature_dim,
                                      int classes, Rng rng);

}  // namespace coldstart
