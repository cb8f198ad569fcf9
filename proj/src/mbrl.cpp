#include "swarm/mbrl.hpp"

#include <algorithm>
#include <cmath>

#include "swarm/errors.hpp"

namespace swarm::mbrl {

namespace {

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<double> joint_obs_of(const agents::Transition& tr, bool next) {
  std::vector<double> joint;
  for (const auto& o : next ? tr.next_obs : tr.obs) joint.insert(joint.end(), o.begin(), o.end());
  return joint;
}

std::vector<double> joint_act_of(const agents::Transition& tr) {
  std::vector<double> joint;
  joint.reserve(tr.actions.size() * 3);
  for (const auto& a : tr.actions)
    for (double v : a) joint.push_back(v);
  return joint;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

VirtualModel VirtualModel::init(int joint_obs_dim, int joint_act_dim, int n_agents, int hidden,
                                double lr, bool residual, Rng& rng) {
  VirtualModel m;
  m.transition = nets::Mlp::init({joint_obs_dim + joint_act_dim, hidden, hidden, joint_obs_dim},
                                 nets::Output::identity, rng);
  m.reward = nets::Mlp::init({joint_obs_dim + joint_act_dim, hidden, hidden, n_agents},
                             nets::Output::identity, rng);
  m.transition_opt = nets::AdamState::for_net(m.transition, lr);
  m.reward_opt = nets::AdamState::for_net(m.reward, lr);
  m.residual_transition = residual;
  return m;
}

std::pair<std::vector<double>, std::vector<double>> model_predict(const VirtualModel& model,
                                                                  std::span<const double> joint_obs,
                                                                  std::span<const double> joint_act) {
  const auto in = concat(joint_obs, joint_act);
  auto next = nets::forward(model.transition, in);
  if (model.residual_transition)
    for (size_t i = 0; i < next.size(); ++i) next[i] += joint_obs[i];
  auto reward = nets::forward(model.reward, in);
  return {std::move(next), std::move(reward)};
}

ModelLosses model_losses(const VirtualModel& model,
                         const std::vector<const agents::Transition*>& batch) {
  if (batch.empty()) throw DimensionError("model_losses: empty batch");
  ModelLosses l;
  for (const auto* tr : batch) {
    const auto z = joint_obs_of(*tr, false);
    const auto a = joint_act_of(*tr);
    const auto zn = joint_obs_of(*tr, true);
    const auto [pred_z, pred_r] = model_predict(model, z, a);
    for (size_t i = 0; i < zn.size(); ++i) {
      const double d = pred_z[i] - zn[i];
      l.transition += d * d;
    }
    for (size_t i = 0; i < tr->rewards.size(); ++i) {
      const double d = pred_r[i] - tr->rewards[i];
      l.reward += d * d;
    }
  }
  l.transition /= static_cast<double>(batch.size());
  l.reward /= static_cast<double>(batch.size());
  return l;
}

ModelLosses model_update(VirtualModel& model, const std::vector<const agents::Transition*>& batch) {
  if (batch.empty()) throw DimensionError("model_update: empty batch");
  const double scale = 2.0 / static_cast<double>(batch.size());
  auto tgrads = nets::Grads::zeros_like(model.transition);
  auto rgrads = nets::Grads::zeros_like(model.reward);
  ModelLosses l;

  for (const auto* tr : batch) {
    const auto z = joint_obs_of(*tr, false);
    const auto a = joint_act_of(*tr);
    const auto zn = joint_obs_of(*tr, true);
    const auto in = concat(z, a);

    nets::Trace ttrace;
    auto pred_z = nets::forward(model.transition, in, ttrace);
    if (model.residual_transition)
      for (size_t i = 0; i < pred_z.size(); ++i) pred_z[i] += z[i];
    std::vector<double> tup(zn.size());
    for (size_t i = 0; i < zn.size(); ++i) {
      const double d = pred_z[i] - zn[i];
      l.transition += d * d;
      tup[i] = scale * d;  // residual path adds no parameter gradient
    }
    nets::backward(model.transition, ttrace, tup, tgrads);

    nets::Trace rtrace;
    const auto pred_r = nets::forward(model.reward, in, rtrace);
    std::vector<double> rup(pred_r.size());
    for (size_t i = 0; i < pred_r.size(); ++i) {
      const double d = pred_r[i] - tr->rewards[i];
      l.reward += d * d;
      rup[i] = scale * d;
    }
    nets::backward(model.reward, rtrace, rup, rgrads);
  }

  l.transition /= static_cast<double>(batch.size());
  l.reward /= static_cast<double>(batch.size());
  if (std::isfinite(l.transition)) nets::optimizer_step(model.transition, tgrads, model.transition_opt);
  if (std::isfinite(l.reward)) nets::optimizer_step(model.reward, rgrads, model.reward_opt);
  return l;
}

double deviation(double transition_loss, double reward_loss, double eps1) {
  return eps1 * transition_loss + (1.0 - eps1) * reward_loss;
}

int adaptive_horizon_raw(double f, const HorizonConfig& cfg) {
  return static_cast<int>(std::floor(-cfg.eps2 * f + static_cast<double>(cfg.n_base)));
}

int adaptive_horizon(double f, const HorizonConfig& cfg) {
  return std::clamp(adaptive_horizon_raw(f, cfg), 1, cfg.n_max);
}

RolloutTrace rollout(VirtualModel& model, const agents::AgentSet& agent_set,
                     std::span<const double> joint_obs, std::span<const double> joint_act, int n) {
  RolloutTrace trace;
  trace.observations.emplace_back(joint_obs.begin(), joint_obs.end());
  trace.actions.emplace_back(joint_act.begin(), joint_act.end());

  for (int k = 0; k < n; ++k) {
    auto [next, reward] = model_predict(model, trace.observations.back(), trace.actions.back());
    if (!all_finite(next) || !all_finite(reward)) {
      model.truncation_events++;
      if (k == 0) {
        // Keep a valid one-step trace: hold the observation, zero the reward.
        next = trace.observations.back();
        std::fill(reward.begin(), reward.end(), 0.0);
      } else {
        trace.actions.pop_back();
        break;
      }
    }
    trace.rewards.push_back(std::move(reward));
    trace.observations.push_back(std::move(next));
    if (k + 1 < n) {
      const auto& z = trace.observations.back();
      std::vector<std::array<double, 3>> acts(agent_set.n_agents);
      for (int j = 0; j < agent_set.n_agents; ++j) {
        std::span<const double> oj(z.data() + static_cast<size_t>(j) * agent_set.obs_dim,
                                   agent_set.obs_dim);
        acts[j] = agent_set.act_array(j, oj, nullptr);
      }
      std::vector<double> joint;
      joint.reserve(acts.size() * 3);
      for (const auto& a : acts)
        for (double v : a) joint.push_back(v);
      trace.actions.push_back(std::move(joint));
    }
  }
  return trace;
}

std::vector<std::vector<double>> multistep_targets(const RolloutTrace& trace,
                                                   const agents::AgentSet& agent_set, double gamma) {
  const int n = trace.steps();
  if (n < 1) throw DimensionError("multistep_targets: empty trace");
  const int agents_n = agent_set.n_agents;

  // Terminal bootstrap from the target critics at the last predicted state.
  const auto& z_term = trace.observations.back();
  std::vector<std::array<double, 3>> term_actions(agents_n);
  for (int j = 0; j < agents_n; ++j) {
    std::span<const double> oj(z_term.data() + static_cast<size_t>(j) * agent_set.obs_dim,
                               agent_set.obs_dim);
    term_actions[j] = agent_set.act_array(j, oj, nullptr);
  }
  std::vector<double> joint_term_act;
  for (const auto& a : term_actions)
    for (double v : a) joint_term_act.push_back(v);

  std::vector<double> bootstrap(agents_n);
  for (int i = 0; i < agents_n; ++i) {
    const auto x = agent_set.critic_input(z_term, joint_term_act, i);
    bootstrap[i] = nets::forward(agent_set.critic_targets[i], x)[0];
  }

  // y[n] = r[n] + gamma * y[n+1], closing with the bootstrapped value.
  std::vector<std::vector<double>> y(n, std::vector<double>(agents_n));
  for (int i = 0; i < agents_n; ++i) {
    double acc = bootstrap[i];
    for (int k = n - 1; k >= 0; --k) {
      acc = trace.rewards[k][i] + gamma * acc;
      y[k][i] = acc;
    }
  }
  return y;
}

MultiStepResult multistep_critic_update(agents::AgentSet& agent_set, VirtualModel& model,
                                        const std::vector<const agents::Transition*>& batch,
                                        double gamma, const HorizonConfig& cfg) {
  if (batch.empty()) throw DimensionError("multistep_critic_update: empty batch");
  MultiStepResult res;
  res.losses = model_losses(model, batch);
  res.deviation = deviation(res.losses.transition, res.losses.reward, cfg.eps1);
  res.horizon_raw = adaptive_horizon_raw(res.deviation, cfg);
  res.horizon = adaptive_horizon(res.deviation, cfg);

  const size_t b = batch.size();
  std::vector<RolloutTrace> traces;
  traces.reserve(b);
  std::vector<std::vector<std::vector<double>>> targets;
  targets.reserve(b);
  for (const auto* tr : batch) {
    auto trace = rollout(model, agent_set, joint_obs_of(*tr, false), joint_act_of(*tr),
                         res.horizon);
    targets.push_back(multistep_targets(trace, agent_set, gamma));
    traces.push_back(std::move(trace));
  }

  res.critic_losses.assign(agent_set.n_agents, 0.0);
  for (int i = 0; i < agent_set.n_agents; ++i) {
    auto grads = nets::Grads::zeros_like(agent_set.critics[i]);
    double loss = 0.0;
    for (size_t e = 0; e < b; ++e) {
      const auto& trace = traces[e];
      for (int k = 0; k < trace.steps(); ++k) {
        const auto x = agent_set.critic_input(trace.observations[k], trace.actions[k], i);
        nets::Trace ctrace;
        const double q = nets::forward(agent_set.critics[i], x, ctrace)[0];
        const double err = q - targets[e][k][i];
        loss += err * err;
        const double upstream = 2.0 * err / static_cast<double>(b);
        nets::backward(agent_set.critics[i], ctrace, std::array<double, 1>{upstream}, grads);
      }
    }
    res.critic_losses[i] = loss / static_cast<double>(b);
    if (std::isfinite(res.critic_losses[i]))
      nets::optimizer_step(agent_set.critics[i], grads, agent_set.critic_opt[i]);
  }
  return res;
}

}  // namespace swarm::mbrl
