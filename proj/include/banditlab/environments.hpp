#pragma once

// Reward generators.
//
// BernoulliEnv: K stationary arms with fixed success probabilities; regret
// is the expected gap mu* - mu_arm.
//
// DatasetEnv: a label stream drawn from a classification dataset. Each step
// reveals one instance, sampled without replacement within a pass; playing
// the arm equal to its class label scores 1. When a pass exhausts the
// dataset, a fresh permutation is drawn from the run's stream and the pass
// restarts. Regret is the realized misclassification 1 - reward, since the
// clairvoyant action always scores 1.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "banditlab/core.hpp"
#include "banditlab/rng.hpp"

namespace banditlab {

class BernoulliEnv {
 public:
  explicit BernoulliEnv(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) {
      throw std::invalid_argument("BernoulliEnv: need at least 2 arms");
    }
    best_mean_ = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("BernoulliEnv: probabilities must lie in [0, 1]");
      }
      best_mean_ = std::max(best_mean_, p);
    }
  }

  std::size_t arm_count() const { return probs_.size(); }
  double prob(ArmId arm) const { return probs_.at(arm); }
  double best_mean() const { return best_mean_; }

  // Consumes exactly one uniform regardless of the outcome.
  BinaryReward pull(ArmId arm, RandomStream& rng) const {
    check_arm(arm);
    return rng.uniform01() < probs_[arm];
  }

  void check_arm(ArmId arm) const {
    if (arm >= probs_.size()) {
      throw std::invalid_argument("BernoulliEnv: arm " + std::to_string(arm) +
                                  " out of range (K = " + std::to_string(probs_.size()) + ")");
    }
  }

 private:
  std::vector<double> probs_;
  double best_mean_;
};

// Expected per-step regret, mu* - mu_arm. The realized reward does not
// enter: the Bernoulli case uses the expectation form of the regret sum.
inline double per_step_regret(const BernoulliEnv& env, ArmId arm, BinaryReward /*reward*/) {
  env.check_arm(arm);
  return env.best_mean() - env.prob(arm);
}

class DatasetEnv {
 public:
  DatasetEnv(std::shared_ptr<const std::vector<ArmId>> labels, std::size_t num_classes)
      : labels_(std::move(labels)), num_classes_(num_classes) {
    if (!labels_ || labels_->empty()) {
      throw std::invalid_argument("DatasetEnv: label stream is empty");
    }
    if (num_classes_ < 2) {
      throw std::invalid_argument("DatasetEnv: need at least 2 classes");
    }
    for (ArmId label : *labels_) {
      if (label >= num_classes_) {
        throw std::invalid_argument("DatasetEnv: label out of range");
      }
    }
    permutation_.resize(labels_->size());
    for (std::size_t i = 0; i < permutation_.size(); ++i) permutation_[i] = i;
    cursor_ = permutation_.size();  // forces a shuffle on the first step
  }

  std::size_t arm_count() const { return num_classes_; }
  std::size_t pass_length() const { return labels_->size(); }

  struct Step {
    BinaryReward reward;
    ArmId true_label;
  };

  // Advances the stream by one instance; reshuffles at pass boundaries with
  // a Fisher-Yates pass driven by `rng` (n - 1 bounded draws).
  Step step(ArmId arm, RandomStream& rng) {
    if (arm >= num_classes_) {
      throw std::invalid_argument("DatasetEnv: arm " + std::to_string(arm) +
                                  " out of range (K = " + std::to_string(num_classes_) + ")");
    }
    if (cursor_ == permutation_.size()) {
      for (std::size_t i = permutation_.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
        std::swap(permutation_[i], permutation_[j]);
      }
      cursor_ = 0;
    }
    const ArmId label = (*labels_)[permutation_[cursor_]];
    ++cursor_;
    return Step{arm == label, label};
  }

 private:
  std::shared_ptr<const std::vector<ArmId>> labels_;
  std::size_t num_classes_;
  std::vector<std::size_t> permutation_;
  std::size_t cursor_;
};

// Realized per-instance regret against the clairvoyant action, which scores
// 1 on every instance; the error rate is then the misclassification rate.
inline double per_step_regret(const DatasetEnv&, ArmId, BinaryReward reward) {
  return reward ? 0.0 : 1.0;
}

using Environment = std::variant<BernoulliEnv, DatasetEnv>;

inline std::size_t arm_count(const Environment& env) {
  return std::visit([](const auto& e) { return e.arm_count(); }, env);
}

struct EnvStep {
  BinaryReward reward;
  double regret;
};

inline EnvStep env_step(Environment& env, ArmId arm, RandomStream& rng) {
  if (auto* bern = std::get_if<BernoulliEnv>(&env)) {
    const BinaryReward reward = bern->pull(arm, rng);
    return EnvStep{reward, per_step_regret(*bern, arm, reward)};
  }
  auto& data = std::get<DatasetEnv>(env);
  const auto step = data.step(arm, rng);
  return EnvStep{step.reward, per_step_regret(data, arm, step.reward)};
}

}  // namespace banditlab
