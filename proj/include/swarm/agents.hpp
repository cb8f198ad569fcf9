#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swarm/ifds.hpp"
#include "swarm/nets.hpp"
#include "swarm/obs.hpp"
#include "swarm/rng.hpp"

namespace swarm::agents {

enum class Mode { ctpde, ctfde, ctfde_mpc, dec_ddpg };

std::string mode_name(Mode mode);
Mode mode_from_name(const std::string& name);
// Extended observations feed the actors in the fully decentralized modes.
bool mode_uses_extended_obs(Mode mode);
// Modes whose actors can be deployed to other swarm sizes unchanged.
bool mode_decentralized_exec(Mode mode);

// One joint experience tuple.
struct Transition {
  std::vector<obs::ObsVector> obs;             // per-UAV actor observations
  std::vector<std::array<double, 3>> actions;  // squashed shaping actions
  std::vector<double> rewards;                 // per-UAV path reward
  std::vector<obs::ObsVector> next_obs;
  std::vector<uint8_t> done;  // per-UAV done flags after the step
  bool terminal = false;      // episode ended on this step
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}

  void push(Transition t);
  size_t size() const { return store_.size(); }
  size_t capacity() const { return capacity_; }

  // Uniform sample without replacement. Returns an empty batch while fewer
  // than n transitions are stored (trainer warms up). Pointers stay valid
  // until the next push.
  std::vector<const Transition*> sample(size_t n, Rng& rng) const;

 private:
  std::vector<Transition> store_;
  size_t capacity_;
  size_t next_ = 0;
};

// Zero-mean Gaussian exploration noise applied before the action squash;
// the scale decays once per episode.
struct NoiseProcess {
  double sigma = 0.3;
  double decay = 0.995;
  Rng rng;

  std::array<double, 3> sample();
  void end_episode() { sigma *= decay; }
};

// Affine-rescaled tanh mapping unbounded actor outputs onto action bounds.
struct ActionSquash {
  ifds::ActionBounds bounds;

  std::array<double, 3> lo() const;
  std::array<double, 3> hi() const;
  std::array<double, 3> apply(const std::array<double, 3>& raw) const;
  std::array<double, 3> derivative(const std::array<double, 3>& raw) const;
};

struct AgentConfig {
  int actor_hidden = 64;
  int critic_hidden = 128;
  double lr = 1e-3;
  double actor_lr = 0.0;    // 0 falls back to lr
  double action_reg = 0.0;  // L2 penalty on pre-squash actor outputs
  // When false the centralized critic sees only the own-observation prefix
  // of each agent's (possibly extended) observation.
  bool critic_extended = false;
};

struct AgentSet {
  Mode mode = Mode::ctfde;
  int n_agents = 0;
  int obs_dim = 0;    // per-UAV actor observation dimension
  int local_dim = 0;  // own-block prefix length within obs
  static constexpr int act_dim = 3;
  bool critic_extended = false;
  double action_reg = 0.0;
  ActionSquash squash;
  std::vector<nets::Mlp> actors, actor_targets, critics, critic_targets;
  std::vector<nets::AdamState> actor_opt, critic_opt;

  static AgentSet init(Mode mode, int n_agents, int obs_dim, int local_dim,
                       const AgentConfig& cfg, Rng& rng);

  // Per-UAV observation block length the critic consumes.
  int critic_block_dim() const { return critic_extended ? obs_dim : local_dim; }
  int critic_in_dim() const;

  std::vector<double> critic_input(std::span<const double> joint_obs,
                                   std::span<const double> joint_act, int i) const;

  std::array<double, 3> act_array(int i, std::span<const double> observation,
                                  NoiseProcess* noise) const;
  std::array<double, 3> target_act_array(int i, std::span<const double> observation) const;
  ifds::ShapingAction act(int i, std::span<const double> observation, NoiseProcess* noise) const;
};

// One fitted-Q step per agent against single-step targets from the target
// networks; terminal transitions drop the bootstrap term. Returns the
// pre-step loss per agent.
std::vector<double> critic_update(AgentSet& agents, const std::vector<const Transition*>& batch,
                                  double gamma);

// Deterministic policy-gradient step per agent (ascent on the critic's
// value); returns -mean(Q) per agent.
std::vector<double> actor_update(AgentSet& agents, const std::vector<const Transition*>& batch);

// Actor update on arbitrary joint-observation rows (model-generated states);
// other agents' action slots come from their current actors.
std::vector<double> actor_update_on(AgentSet& agents,
                                    const std::vector<std::vector<double>>& joint_obs_rows);

void update_targets(AgentSet& agents, double zeta);

}  // namespace swarm::agents
