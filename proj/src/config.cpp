#include "swarm/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "swarm/errors.hpp"

namespace swarm::config {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  }
}

uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad seed for " + key + ": '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void apply(Config& c, const std::string& key, const std::string& value) {
  auto& e = c.env;
  auto& t = c.train;
  auto& a = c.agent;
  auto& h = c.horizon;
  auto& m = c.model;
  if (key == "env.uavs") e.uavs = to_int(key, value);
  else if (key == "env.destinations") e.destinations = to_int(key, value);
  else if (key == "env.hazards_min") e.hazards_min = to_int(key, value);
  else if (key == "env.hazards_max") e.hazards_max = to_int(key, value);
  else if (key == "env.change_interval") e.change_interval = to_int(key, value);
  else if (key == "env.uav_radius") e.uav_radius = to_double(key, value);
  else if (key == "env.hazard_radius") e.hazard_radius = to_double(key, value);
  else if (key == "env.neighbor_dist") e.neighbor_dist = to_double(key, value);
  else if (key == "env.threat_dist") e.threat_dist = to_double(key, value);
  else if (key == "env.completion_dist") e.completion_dist = to_double(key, value);
  else if (key == "env.dt") e.dt = to_double(key, value);
  else if (key == "env.v_max") e.v_max = to_double(key, value);
  else if (key == "env.segment_min") e.segment_min = to_double(key, value);
  else if (key == "env.path_total_max") e.path_total_max = to_double(key, value);
  else if (key == "env.h_min") e.h_min = to_double(key, value);
  else if (key == "env.h_max") e.h_max = to_double(key, value);
  else if (key == "env.t_max") e.t_max = to_int(key, value);
  else if (key == "env.reward_a") e.reward_a = to_double(key, value);
  else if (key == "env.reward_b") e.reward_b = to_double(key, value);
  else if (key == "env.reward_c") e.reward_c = to_double(key, value);
  else if (key == "env.arena_x") e.arena.x = to_double(key, value);
  else if (key == "env.arena_y") e.arena.y = to_double(key, value);
  else if (key == "env.arena_z") e.arena.z = to_double(key, value);
  else if (key == "env.hazard_slots") e.hazard_slots = to_int(key, value);
  else if (key == "env.min_start_goal") e.min_start_goal = to_double(key, value);
  else if (key == "train.episodes") t.episodes = to_int(key, value);
  else if (key == "train.instances") t.instances = to_int(key, value);
  else if (key == "train.seed") t.seed = to_u64(key, value);
  else if (key == "train.batch") t.batch = to_int(key, value);
  else if (key == "train.buffer_capacity") t.buffer_capacity = to_int(key, value);
  else if (key == "train.gamma") t.gamma = to_double(key, value);
  else if (key == "train.zeta") t.zeta = to_double(key, value);
  else if (key == "train.lr") t.lr = to_double(key, value);
  else if (key == "train.actor_lr") t.actor_lr = to_double(key, value);
  else if (key == "train.noise_sigma") t.noise_sigma = to_double(key, value);
  else if (key == "train.noise_decay") t.noise_decay = to_double(key, value);
  else if (key == "train.update_every") t.update_every = to_int(key, value);
  else if (key == "train.update_rounds") t.update_rounds = to_int(key, value);
  else if (key == "train.action_reg") t.action_reg = to_double(key, value);
  else if (key == "train.actor_on_model") t.actor_on_model = to_bool(key, value);
  else if (key == "agent.actor_hidden") a.actor_hidden = to_int(key, value);
  else if (key == "agent.critic_hidden") a.critic_hidden = to_int(key, value);
  else if (key == "agent.critic_obs") a.critic_obs = value;
  else if (key == "agent.mean_field_fields") a.mean_field_fields = value;
  else if (key == "horizon.eps1") h.eps1 = to_double(key, value);
  else if (key == "horizon.eps2") h.eps2 = to_double(key, value);
  else if (key == "horizon.n_base") h.n_base = to_int(key, value);
  else if (key == "horizon.n_max") h.n_max = to_int(key, value);
  else if (key == "model.hidden") m.hidden = to_int(key, value);
  else if (key == "model.lr") m.lr = to_double(key, value);
  else if (key == "model.updates_per_round") m.updates_per_round = to_int(key, value);
  else if (key == "model.residual_transition") m.residual_transition = to_bool(key, value);
  else throw ConfigError("unknown config key: " + key);
}

}  // namespace

Config parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    apply(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Config::validate(agents::Mode mode) const {
  env.validate();
  if (train.episodes < 1) throw ConfigError("train.episodes must be >= 1");
  if (train.instances < 1) throw ConfigError("train.instances must be >= 1");
  if (train.batch < 1) throw ConfigError("train.batch must be >= 1");
  if (train.buffer_capacity < train.batch) throw ConfigError("train.buffer_capacity below batch");
  if (train.gamma <= 0.0 || train.gamma >= 1.0) throw ConfigError("train.gamma must be in (0,1)");
  if (train.zeta < 0.0 || train.zeta >= 1.0) throw ConfigError("train.zeta must be in [0,1)");
  if (train.lr <= 0.0) throw ConfigError("train.lr must be positive");
  if (train.actor_lr < 0.0) throw ConfigError("train.actor_lr must be >= 0");
  if (train.noise_sigma < 0.0) throw ConfigError("train.noise_sigma must be >= 0");
  if (train.noise_decay <= 0.0 || train.noise_decay > 1.0)
    throw ConfigError("train.noise_decay must be in (0,1]");
  if (train.update_every < 1) throw ConfigError("train.update_every must be >= 1");
  if (train.update_rounds < 1) throw ConfigError("train.update_rounds must be >= 1");
  if (train.action_reg < 0.0) throw ConfigError("train.action_reg must be >= 0");
  if (model.lr < 0.0) throw ConfigError("model.lr must be >= 0");
  if (model.updates_per_round < 1) throw ConfigError("model.updates_per_round must be >= 1");
  if (agent.actor_hidden < 1 || agent.critic_hidden < 1 || model.hidden < 1)
    throw ConfigError("hidden sizes must be >= 1");
  if (agent.critic_obs != "raw" && agent.critic_obs != "extended")
    throw ConfigError("agent.critic_obs must be raw or extended");
  if (agent.mean_field_fields != "full" && agent.mean_field_fields != "kinematic")
    throw ConfigError("agent.mean_field_fields must be full or kinematic");
  if (horizon.eps1 < 0.0 || horizon.eps1 > 1.0) throw ConfigError("horizon.eps1 must be in [0,1]");
  if (horizon.eps2 < 0.0) throw ConfigError("horizon.eps2 must be >= 0");
  if (horizon.n_base < 1 || horizon.n_max < 1) throw ConfigError("horizon bases must be >= 1");
  if (!agents::mode_uses_extended_obs(mode) && agent.critic_obs == "extended")
    throw ConfigError("agent.critic_obs=extended requires a ctfde mode");
}

std::string serialize(const Config& cfg) {
  std::ostringstream out;
  const auto& e = cfg.env;
  const auto& t = cfg.train;
  const auto& a = cfg.agent;
  const auto& h = cfg.horizon;
  const auto& m = cfg.model;
  out << "env.uavs = " << e.uavs << "\n";
  out << "env.destinations = " << e.destinations << "\n";
  out << "env.hazards_min = " << e.hazards_min << "\n";
  out << "env.hazards_max = " << e.hazards_max << "\n";
  out << "env.change_interval = " << e.change_interval << "\n";
  out << "env.uav_radius = " << fmt_double(e.uav_radius) << "\n";
  out << "env.hazard_radius = " << fmt_double(e.hazard_radius) << "\n";
  out << "env.neighbor_dist = " << fmt_double(e.neighbor_dist) << "\n";
  out << "env.threat_dist = " << fmt_double(e.threat_dist) << "\n";
  out << "env.completion_dist = " << fmt_double(e.completion_dist) << "\n";
  out << "env.dt = " << fmt_double(e.dt) << "\n";
  out << "env.v_max = " << fmt_double(e.v_max) << "\n";
  out << "env.segment_min = " << fmt_double(e.segment_min) << "\n";
  out << "env.path_total_max = " << fmt_double(e.path_total_max) << "\n";
  out << "env.h_min = " << fmt_double(e.h_min) << "\n";
  out << "env.h_max = " << fmt_double(e.h_max) << "\n";
  out << "env.t_max = " << e.t_max << "\n";
  out << "env.reward_a = " << fmt_double(e.reward_a) << "\n";
  out << "env.reward_b = " << fmt_double(e.reward_b) << "\n";
  out << "env.reward_c = " << fmt_double(e.reward_c) << "\n";
  out << "env.arena_x = " << fmt_double(e.arena.x) << "\n";
  out << "env.arena_y = " << fmt_double(e.arena.y) << "\n";
  out << "env.arena_z = " << fmt_double(e.arena.z) << "\n";
  out << "env.hazard_slots = " << e.hazard_slots << "\n";
  out << "env.min_start_goal = " << fmt_double(e.min_start_goal) << "\n";
  out << "train.episodes = " << t.episodes << "\n";
  out << "train.instances = " << t.instances << "\n";
  out << "train.seed = " << t.seed << "\n";
  out << "train.batch = " << t.batch << "\n";
  out << "train.buffer_capacity = " << t.buffer_capacity << "\n";
  out << "train.gamma = " << fmt_double(t.gamma) << "\n";
  out << "train.zeta = " << fmt_double(t.zeta) << "\n";
  out << "train.lr = " << fmt_double(t.lr) << "\n";
  out << "train.actor_lr = " << fmt_double(t.actor_lr) << "\n";
  out << "train.noise_sigma = " << fmt_double(t.noise_sigma) << "\n";
  out << "train.noise_decay = " << fmt_double(t.noise_decay) << "\n";
  out << "train.update_every = " << t.update_every << "\n";
  out << "train.update_rounds = " << t.update_rounds << "\n";
  out << "train.action_reg = " << fmt_double(t.action_reg) << "\n";
  out << "train.actor_on_model = " << (t.actor_on_model ? "true" : "false") << "\n";
  out << "agent.actor_hidden = " << a.actor_hidden << "\n";
  out << "agent.critic_hidden = " << a.critic_hidden << "\n";
  out << "agent.critic_obs = " << a.critic_obs << "\n";
  out << "agent.mean_field_fields = " << a.mean_field_fields << "\n";
  out << "horizon.eps1 = " << fmt_double(h.eps1) << "\n";
  out << "horizon.eps2 = " << fmt_double(h.eps2) << "\n";
  out << "horizon.n_base = " << h.n_base << "\n";
  out << "horizon.n_max = " << h.n_max << "\n";
  out << "model.hidden = " << m.hidden << "\n";
  out << "model.lr = " << fmt_double(m.lr) << "\n";
  out << "model.updates_per_round = " << m.updates_per_round << "\n";
  out << "model.residual_transition = " << (m.residual_transition ? "true" : "false") << "\n";
  return out.str();
}

uint64_t hash(const Config& cfg) {
  const std::string text = serialize(cfg);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace swarm::config
