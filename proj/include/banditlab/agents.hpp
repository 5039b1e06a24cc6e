#pragma once

// The Thompson-style agent: sample one theta per arm from its Beta
// posterior, play the argmax, then apply the weighted update matching the
// reward sign. The reward mode gates which updates execute at all.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "banditlab/core.hpp"
#include "banditlab/rng.hpp"

namespace banditlab {

struct AgentState {
  std::vector<ArmPosterior> posteriors;
  BiasProfile profile;  // post-jitter weights, fixed for the run

  std::size_t arm_count() const { return posteriors.size(); }
};

inline AgentState new_agent(std::size_t num_arms, BiasProfile profile) {
  if (num_arms < 2) {
    throw std::invalid_argument("new_agent: need at least 2 arms, got " +
                                std::to_string(num_arms));
  }
  AgentState agent;
  agent.posteriors.assign(num_arms, ArmPosterior{});  // S = F = 1
  agent.profile = std::move(profile);
  return agent;
}

// Argmax over per-arm samples produced by `theta_of(index, posterior)`.
// Ties resolve to the lowest index; with continuous Beta samples ties are
// measure-zero, but a fixed rule keeps traces replayable.
template <class Sampler>
ArmId select_arm_sampled(const AgentState& agent, Sampler&& theta_of) {
  ArmId best = 0;
  double best_theta = theta_of(ArmId{0}, agent.posteriors[0]);
  for (ArmId i = 1; i < agent.posteriors.size(); ++i) {
    const double theta = theta_of(i, agent.posteriors[i]);
    if (theta > best_theta) {
      best_theta = theta;
      best = i;
    }
  }
  return best;
}

// Samples arms in index order 0..K-1, which is part of the replay contract.
inline ArmId select_arm(const AgentState& agent, RandomStream& rng) {
  return select_arm_sampled(agent, [&rng](ArmId, const ArmPosterior& post) {
    return rng.beta(post.successes, post.failures);
  });
}

// Applies the update matching the reward sign to the chosen arm only.
// PositiveOnly suppresses failure updates, NegativeOnly success updates;
// a suppressed observation leaves the agent untouched.
inline void observe(AgentState& agent, ArmId arm, BinaryReward reward, RewardMode mode) {
  if (arm >= agent.posteriors.size()) {
    throw std::invalid_argument("observe: arm " + std::to_string(arm) +
                                " out of range (K = " +
                                std::to_string(agent.posteriors.size()) + ")");
  }
  if (reward) {
    if (mode != RewardMode::NegativeOnly) {
      agent.posteriors[arm] = update_success(agent.posteriors[arm], agent.profile);
    }
  } else {
    if (mode != RewardMode::PositiveOnly) {
      agent.posteriors[arm] = update_failure(agent.posteriors[arm], agent.profile);
    }
  }
}

}  // namespace banditlab
