#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "swarm/agents.hpp"
#include "swarm/env.hpp"
#include "swarm/mbrl.hpp"

namespace swarm::config {

struct TrainConfig {
  int episodes = 30;
  int instances = 100;
  uint64_t seed = 0;
  int batch = 128;
  int buffer_capacity = 100000;
  double gamma = 0.99;
  double zeta = 0.99;
  double lr = 1e-3;
  double actor_lr = 0.0;  // 0 falls back to lr
  double noise_sigma = 0.3;
  double noise_decay = 0.995;
  int update_every = 1;   // env steps between gradient update rounds
  int update_rounds = 1;  // gradient update rounds per trigger
  double action_reg = 0.0;  // L2 penalty on pre-squash actor outputs
  bool actor_on_model = false;  // also update actors on model-predicted states
};

struct ModelConfig {
  int hidden = 128;
  double lr = 0.0;           // 0 falls back to train.lr
  int updates_per_round = 1;  // model gradient steps per update round
  bool residual_transition = false;
};

struct AgentKeys {
  int actor_hidden = 64;
  int critic_hidden = 128;
  std::string critic_obs = "raw";         // raw | extended
  std::string mean_field_fields = "full";  // full | kinematic
};

// Whole-run configuration, parsed from flat "section.key = value" text.
// Unknown keys are errors.
struct Config {
  env::EnvConfig env;
  TrainConfig train;
  AgentKeys agent;
  mbrl::HorizonConfig horizon;
  ModelConfig model;

  void validate(agents::Mode mode) const;  // cross-field and mode checks
  bool critic_extended() const { return agent.critic_obs == "extended"; }
  bool mean_field_kinematic() const { return agent.mean_field_fields == "kinematic"; }
};

Config parse(const std::string& text);
Config load(const std::filesystem::path& path);

// Canonical text with every key in a fixed order; parse(serialize(c)) == c.
std::string serialize(const Config& cfg);

// FNV-1a over the canonical text.
uint64_t hash(const Config& cfg);

}  // namespace swarm::config
