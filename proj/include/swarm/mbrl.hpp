#pragma once

#include <span>
#include <vector>

#include "swarm/agents.hpp"
#include "swarm/nets.hpp"

namespace swarm::mbrl {

// Learned one-step environment: a joint observation-transition network and a
// per-UAV reward network, both over (joint obs, joint actions). With
// residual_transition the transition net predicts the change in the joint
// observation instead of its absolute value.
struct VirtualModel {
  nets::Mlp transition;
  nets::Mlp reward;
  nets::AdamState transition_opt;
  nets::AdamState reward_opt;
  bool residual_transition = false;
  long truncation_events = 0;  // non-finite rollout predictions

  static VirtualModel init(int joint_obs_dim, int joint_act_dim, int n_agents, int hidden,
                           double lr, bool residual, Rng& rng);
  int obs_dim() const { return transition.out_dim(); }
  int act_dim() const { return transition.in_dim() - transition.out_dim(); }
};

struct HorizonConfig {
  double eps1 = 0.25;  // deviation weight between transition and reward losses
  double eps2 = 0.66;  // horizon shrink rate
  int n_base = 6;
  int n_max = 5;
};

struct ModelLosses {
  double transition = 0.0;  // mean squared joint-observation prediction error
  double reward = 0.0;      // mean squared reward prediction error
};

std::pair<std::vector<double>, std::vector<double>> model_predict(const VirtualModel& model,
                                                                  std::span<const double> joint_obs,
                                                                  std::span<const double> joint_act);

// Batch losses under the current model, no parameter change.
ModelLosses model_losses(const VirtualModel& model,
                         const std::vector<const agents::Transition*>& batch);

// One gradient step on each network; returns the losses before the step.
ModelLosses model_update(VirtualModel& model, const std::vector<const agents::Transition*>& batch);

// Model-environment deviation F = eps1 * L_transition + (1 - eps1) * L_reward.
double deviation(double transition_loss, double reward_loss, double eps1);

// Unclamped floor(-eps2 * F + n_base).
int adaptive_horizon_raw(double f, const HorizonConfig& cfg);
// Clamped to [1, n_max].
int adaptive_horizon(double f, const HorizonConfig& cfg);

// Imagined trajectory from a real transition: observations[0] is the real
// joint observation, actions[0] the real joint action, and rewards[n] the
// model reward at step n. observations has length steps()+1 (the last entry
// bootstraps the value target). Actions beyond index 0 come from the online
// actors without exploration noise.
struct RolloutTrace {
  std::vector<std::vector<double>> observations;
  std::vector<std::vector<double>> actions;
  std::vector<std::vector<double>> rewards;  // per-UAV model rewards
  int steps() const { return static_cast<int>(rewards.size()); }
};

RolloutTrace rollout(VirtualModel& model, const agents::AgentSet& agents,
                     std::span<const double> joint_obs, std::span<const double> joint_act, int n);

// Value-expansion targets y[n][i] for n in [0, steps): discounted model
// rewards plus a bootstrapped terminal value from the target critics.
std::vector<std::vector<double>> multistep_targets(const RolloutTrace& trace,
                                                   const agents::AgentSet& agents, double gamma);

struct MultiStepResult {
  ModelLosses losses;           // batch model losses used for the horizon
  double deviation = 0.0;       // F
  int horizon_raw = 0;          // before clamping
  int horizon = 1;              // N actually used
  std::vector<double> critic_losses;
};

// Critic update against value-expansion targets: horizon from the batch
// model losses, one rollout per batch element, and a squared-error sum over
// the trace averaged over the batch. The real (obs, action) pair is the
// critic input at n = 0.
MultiStepResult multistep_critic_update(agents::AgentSet& agent_set, VirtualModel& model,
                                        const std::vector<const agents::Transition*>& batch,
                                        double gamma, const HorizonConfig& cfg);

}  // namespace swarm::mbrl
