#include "swarm/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swarm/errors.hpp"

namespace swarm::agents {

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::ctpde: return "ctpde";
    case Mode::ctfde: return "ctfde";
    case Mode::ctfde_mpc: return "ctfde-mpc";
    case Mode::dec_ddpg: return "dec-ddpg";
  }
  return "?";
}

Mode mode_from_name(const std::string& name) {
  if (name == "ctpde") return Mode::ctpde;
  if (name == "ctfde") return Mode::ctfde;
  if (name == "ctfde-mpc") return Mode::ctfde_mpc;
  if (name == "dec-ddpg") return Mode::dec_ddpg;
  throw ModeError("unknown mode: " + name);
}

bool mode_uses_extended_obs(Mode mode) {
  return mode == Mode::ctfde || mode == Mode::ctfde_mpc;
}

bool mode_decentralized_exec(Mode mode) { return mode != Mode::ctpde; }

void ReplayBuffer::push(Transition t) {
  if (store_.size() < capacity_) {
    store_.push_back(std::move(t));
  } else {
    store_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
}

std::vector<const Transition*> ReplayBuffer::sample(size_t n, Rng& rng) const {
  if (store_.size() < n) return {};
  std::vector<size_t> idx(store_.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<const Transition*> out;
  out.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    const size_t pick = k + static_cast<size_t>(rng.uniform_int(static_cast<int>(idx.size() - k)));
    std::swap(idx[k], idx[pick]);
    out.push_back(&store_[idx[k]]);
  }
  return out;
}

std::array<double, 3> NoiseProcess::sample() {
  return {sigma * rng.normal(), sigma * rng.normal(), sigma * rng.normal()};
}

std::array<double, 3> ActionSquash::lo() const {
  return {bounds.gain_min, bounds.gain_min, -std::numbers::pi};
}

std::array<double, 3> ActionSquash::hi() const {
  return {bounds.gain_max, bounds.gain_max, std::numbers::pi};
}

std::array<double, 3> ActionSquash::apply(const std::array<double, 3>& raw) const {
  const auto l = lo();
  const auto h = hi();
  std::array<double, 3> a;
  for (int d = 0; d < 3; ++d) a[d] = l[d] + (h[d] - l[d]) * 0.5 * (std::tanh(raw[d]) + 1.0);
  return a;
}

std::array<double, 3> ActionSquash::derivative(const std::array<double, 3>& raw) const {
  const auto l = lo();
  const auto h = hi();
  std::array<double, 3> d;
  for (int k = 0; k < 3; ++k) {
    const double t = std::tanh(raw[k]);
    d[k] = (h[k] - l[k]) * 0.5 * (1.0 - t * t);
  }
  return d;
}

AgentSet AgentSet::init(Mode mode, int n_agents, int obs_dim, int local_dim,
                        const AgentConfig& cfg, Rng& rng) {
  AgentSet set;
  set.mode = mode;
  set.n_agents = n_agents;
  set.obs_dim = obs_dim;
  set.local_dim = local_dim;
  set.critic_extended = cfg.critic_extended;
  set.action_reg = cfg.action_reg;
  for (int i = 0; i < n_agents; ++i) {
    auto actor = nets::Mlp::init({obs_dim, cfg.actor_hidden, cfg.actor_hidden, act_dim},
                                 nets::Output::identity, rng);
    auto critic = nets::Mlp::init({set.critic_in_dim(), cfg.critic_hidden, cfg.critic_hidden, 1},
                                  nets::Output::identity, rng);
    set.actor_targets.push_back(actor);
    set.critic_targets.push_back(critic);
    const double actor_lr = cfg.actor_lr > 0.0 ? cfg.actor_lr : cfg.lr;
    set.actor_opt.push_back(nets::AdamState::for_net(actor, actor_lr));
    set.critic_opt.push_back(nets::AdamState::for_net(critic, cfg.lr));
    set.actors.push_back(std::move(actor));
    set.critics.push_back(std::move(critic));
  }
  return set;
}

int AgentSet::critic_in_dim() const {
  if (mode == Mode::dec_ddpg) return critic_block_dim() + act_dim;
  return n_agents * (critic_block_dim() + act_dim);
}

std::vector<double> AgentSet::critic_input(std::span<const double> joint_obs,
                                           std::span<const double> joint_act, int i) const {
  const int block = critic_block_dim();
  std::vector<double> in;
  in.reserve(critic_in_dim());
  if (mode == Mode::dec_ddpg) {
    const double* o = joint_obs.data() + static_cast<size_t>(i) * obs_dim;
    in.insert(in.end(), o, o + block);
    const double* a = joint_act.data() + static_cast<size_t>(i) * act_dim;
    in.insert(in.end(), a, a + act_dim);
    return in;
  }
  for (int j = 0; j < n_agents; ++j) {
    const double* o = joint_obs.data() + static_cast<size_t>(j) * obs_dim;
    in.insert(in.end(), o, o + block);
  }
  in.insert(in.end(), joint_act.begin(), joint_act.end());
  return in;
}

std::array<double, 3> AgentSet::act_array(int i, std::span<const double> observation,
                                          NoiseProcess* noise) const {
  auto raw = nets::forward(actors.at(i), observation);
  std::array<double, 3> pre{raw[0], raw[1], raw[2]};
  if (noise) {
    const auto n = noise->sample();
    for (int d = 0; d < 3; ++d) pre[d] += n[d];
  }
  return squash.apply(pre);
}

std::array<double, 3> AgentSet::target_act_array(int i, std::span<const double> observation) const {
  auto raw = nets::forward(actor_targets.at(i), observation);
  return squash.apply({raw[0], raw[1], raw[2]});
}

ifds::ShapingAction AgentSet::act(int i, std::span<const double> observation,
                                  NoiseProcess* noise) const {
  const auto a = act_array(i, observation, noise);
  return {a[0], a[1], a[2]};
}

namespace {

std::vector<double> concat_obs(const std::vector<obs::ObsVector>& per_uav) {
  std::vector<double> joint;
  for (const auto& o : per_uav) joint.insert(joint.end(), o.begin(), o.end());
  return joint;
}

std::vector<double> concat_act(const std::vector<std::array<double, 3>>& per_uav) {
  std::vector<double> joint;
  joint.reserve(per_uav.size() * 3);
  for (const auto& a : per_uav)
    for (double v : a) joint.push_back(v);
  return joint;
}

}  // namespace

std::vector<double> critic_update(AgentSet& agents, const std::vector<const Transition*>& batch,
                                  double gamma) {
  const size_t b = batch.size();
  if (b == 0) throw DimensionError("critic_update: empty batch");
  const int n = agents.n_agents;

  // Shared per-element joints and target actions at the next observation.
  std::vector<std::vector<double>> joint_obs(b), joint_act(b), joint_next(b), joint_next_act(b);
  for (size_t e = 0; e < b; ++e) {
    const Transition& tr = *batch[e];
    joint_obs[e] = concat_obs(tr.obs);
    joint_act[e] = concat_act(tr.actions);
    joint_next[e] = concat_obs(tr.next_obs);
    std::vector<std::array<double, 3>> next_actions(n);
    for (int j = 0; j < n; ++j) {
      std::span<const double> oj(joint_next[e].data() + static_cast<size_t>(j) * agents.obs_dim,
                                 agents.obs_dim);
      next_actions[j] = agents.target_act_array(j, oj);
    }
    joint_next_act[e] = concat_act(next_actions);
  }

  std::vector<double> losses(n, 0.0);
  for (int i = 0; i < n; ++i) {
    auto grads = nets::Grads::zeros_like(agents.critics[i]);
    double loss = 0.0;
    for (size_t e = 0; e < b; ++e) {
      const Transition& tr = *batch[e];
      double target = tr.rewards[i];
      if (!tr.terminal) {
        const auto xin = agents.critic_input(joint_next[e], joint_next_act[e], i);
        target += gamma * nets::forward(agents.critic_targets[i], xin)[0];
      }
      const auto x = agents.critic_input(joint_obs[e], joint_act[e], i);
      nets::Trace trace;
      const double q = nets::forward(agents.critics[i], x, trace)[0];
      const double err = q - target;
      loss += err * err;
      const double upstream = 2.0 * err / static_cast<double>(b);
      nets::backward(agents.critics[i], trace, std::array<double, 1>{upstream}, grads);
    }
    losses[i] = loss / static_cast<double>(b);
    if (std::isfinite(losses[i])) nets::optimizer_step(agents.critics[i], grads, agents.critic_opt[i]);
  }
  return losses;
}

namespace {

// Core of the policy-gradient step. Joint observations come per row; the
// action slots for agents other than i are given by `base_actions` per row
// (from the batch, or from the current actors on synthetic rows).
std::vector<double> actor_update_rows(AgentSet& agents,
                                      const std::vector<std::vector<double>>& joint_obs_rows,
                                      const std::vector<std::vector<double>>& base_actions) {
  const size_t b = joint_obs_rows.size();
  if (b == 0) throw DimensionError("actor_update: empty batch");
  const int n = agents.n_agents;
  const int block = agents.critic_block_dim();

  std::vector<double> losses(n, 0.0);
  for (int i = 0; i < n; ++i) {
    auto grads = nets::Grads::zeros_like(agents.actors[i]);
    double q_sum = 0.0;
    double reg_sum = 0.0;
    for (size_t e = 0; e < b; ++e) {
      std::span<const double> oi(joint_obs_rows[e].data() + static_cast<size_t>(i) * agents.obs_dim,
                                 agents.obs_dim);
      nets::Trace atrace;
      const auto raw_v = nets::forward(agents.actors[i], oi, atrace);
      const std::array<double, 3> raw{raw_v[0], raw_v[1], raw_v[2]};
      const auto squashed = agents.squash.apply(raw);

      std::vector<double> joint_act = base_actions[e];
      for (int d = 0; d < 3; ++d) joint_act[static_cast<size_t>(i) * 3 + d] = squashed[d];

      const auto x = agents.critic_input(joint_obs_rows[e], joint_act, i);
      nets::Trace ctrace;
      const double q = nets::forward(agents.critics[i], x, ctrace)[0];
      q_sum += q;

      auto cgrads = nets::Grads::zeros_like(agents.critics[i]);
      const double upstream = -1.0 / static_cast<double>(b);  // descend on -Q
      const auto dx = nets::backward(agents.critics[i], ctrace, std::array<double, 1>{upstream},
                                     cgrads);
      // Slice the gradient at agent i's action block and chain the squash.
      const size_t act_off = (agents.mode == Mode::dec_ddpg)
                                 ? static_cast<size_t>(block)
                                 : static_cast<size_t>(n) * block + static_cast<size_t>(i) * 3;
      const auto dsq = agents.squash.derivative(raw);
      std::array<double, 3> da;
      const double inv_b = 1.0 / static_cast<double>(b);
      for (int d = 0; d < 3; ++d) {
        da[d] = dx[act_off + d] * dsq[d];
        // Keep pre-squash outputs inside the active tanh range.
        da[d] += 2.0 * agents.action_reg * raw[d] * inv_b;
        reg_sum += agents.action_reg * raw[d] * raw[d];
      }
      nets::backward(agents.actors[i], atrace, da, grads);
    }
    losses[i] = (-q_sum + reg_sum) / static_cast<double>(b);
    if (std::isfinite(losses[i])) nets::optimizer_step(agents.actors[i], grads, agents.actor_opt[i]);
  }
  return losses;
}

}  // namespace

std::vector<double> actor_update(AgentSet& agents, const std::vector<const Transition*>& batch) {
  std::vector<std::vector<double>> rows(batch.size()), acts(batch.size());
  for (size_t e = 0; e < batch.size(); ++e) {
    rows[e] = concat_obs(batch[e]->obs);
    acts[e] = concat_act(batch[e]->actions);
  }
  return actor_update_rows(agents, rows, acts);
}

std::vector<double> actor_update_on(AgentSet& agents,
                                    const std::vector<std::vector<double>>& joint_obs_rows) {
  std::vector<std::vector<double>> acts(joint_obs_rows.size());
  for (size_t e = 0; e < joint_obs_rows.size(); ++e) {
    std::vector<std::array<double, 3>> per_uav(agents.n_agents);
    for (int j = 0; j < agents.n_agents; ++j) {
      std::span<const double> oj(joint_obs_rows[e].data() + static_cast<size_t>(j) * agents.obs_dim,
                                 agents.obs_dim);
      per_uav[j] = agents.act_array(j, oj, nullptr);
    }
    acts[e] = concat_act(per_uav);
  }
  return actor_update_rows(agents, joint_obs_rows, acts);
}

void update_targets(AgentSet& agents, double zeta) {
  for (int i = 0; i < agents.n_agents; ++i) {
    nets::soft_update(agents.actor_targets[i], agents.actors[i], zeta);
    nets::soft_update(agents.critic_targets[i], agents.critics[i], zeta);
  }
}

}  // namespace swarm::agents
