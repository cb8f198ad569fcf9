#include "swarm/nets.hpp"

#include <cmath>
#include <cstddef>

#include "swarm/errors.hpp"

namespace swarm::nets {

namespace {

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw DimensionError("mlp needs at least input and output layers");
  for (int s : sizes)
    if (s < 1) throw DimensionError("mlp layer sizes must be positive");
}

}  // namespace

Mlp Mlp::init(std::vector<int> sizes, Output output, Rng& rng) {
  check_sizes(sizes);
  Mlp net;
  net.layer_sizes = std::move(sizes);
  net.output = output;
  for (size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    const int in = net.layer_sizes[l];
    const int out = net.layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::vector<double> w(static_cast<size_t>(in) * out);
    for (auto& v : w) v = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(out, 0.0);
  }
  return net;
}

Mlp Mlp::zeros(std::vector<int> sizes, Output output) {
  check_sizes(sizes);
  Mlp net;
  net.layer_sizes = std::move(sizes);
  net.output = output;
  for (size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    net.weights.emplace_back(static_cast<size_t>(net.layer_sizes[l]) * net.layer_sizes[l + 1], 0.0);
    net.biases.emplace_back(net.layer_sizes[l + 1], 0.0);
  }
  return net;
}

size_t Mlp::param_count() const {
  size_t n = 0;
  for (size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

bool Mlp::same_shape(const Mlp& o) const {
  return layer_sizes == o.layer_sizes && output == o.output;
}

Grads Grads::zeros_like(const Mlp& net) {
  Grads g;
  for (size_t l = 0; l < net.weights.size(); ++l) {
    g.weights.emplace_back(net.weights[l].size(), 0.0);
    g.biases.emplace_back(net.biases[l].size(), 0.0);
  }
  g.input.assign(net.in_dim(), 0.0);
  return g;
}

void Grads::accumulate(const Grads& o) {
  for (size_t l = 0; l < weights.size(); ++l) {
    for (size_t i = 0; i < weights[l].size(); ++i) weights[l][i] += o.weights[l][i];
    for (size_t i = 0; i < biases[l].size(); ++i) biases[l][i] += o.biases[l][i];
  }
  for (size_t i = 0; i < input.size(); ++i) input[i] += o.input[i];
}

void Grads::scale(double s) {
  for (auto& w : weights)
    for (auto& v : w) v *= s;
  for (auto& b : biases)
    for (auto& v : b) v *= s;
  for (auto& v : input) v *= s;
}

bool Grads::finite() const {
  for (const auto& w : weights)
    for (double v : w)
      if (!std::isfinite(v)) return false;
  for (const auto& b : biases)
    for (double v : b)
      if (!std::isfinite(v)) return false;
  return true;
}

std::vector<double> forward(const Mlp& net, std::span<const double> input) {
  Trace trace;
  return forward(net, input, trace);
}

std::vector<double> forward(const Mlp& net, std::span<const double> input, Trace& trace) {
  if (static_cast<int>(input.size()) != net.in_dim())
    throw DimensionError("forward: input dimension mismatch");
  trace.acts.assign(1, std::vector<double>(input.begin(), input.end()));
  trace.acts.reserve(net.layer_count() + 1);

  for (size_t l = 0; l < net.layer_count(); ++l) {
    const auto& x = trace.acts[l];
    const int in = net.layer_sizes[l];
    const int out = net.layer_sizes[l + 1];
    std::vector<double> y(out);
    const double* w = net.weights[l].data();
    for (int o = 0; o < out; ++o) {
      double acc = net.biases[l][o];
      const double* row = w + static_cast<size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += row[i] * x[i];
      y[o] = acc;
    }
    const bool last = (l + 1 == net.layer_count());
    if (!last || net.output == Output::bounded)
      for (auto& v : y) v = std::tanh(v);
    trace.acts.push_back(std::move(y));
  }
  return trace.acts.back();
}

std::vector<double> backward(const Mlp& net, const Trace& trace,
                             std::span<const double> upstream, Grads& grads) {
  if (static_cast<int>(upstream.size()) != net.out_dim())
    throw DimensionError("backward: upstream dimension mismatch");

  std::vector<double> delta(upstream.begin(), upstream.end());
  for (size_t li = net.layer_count(); li-- > 0;) {
    const auto& y = trace.acts[li + 1];
    const auto& x = trace.acts[li];
    const int in = net.layer_sizes[li];
    const int out = net.layer_sizes[li + 1];

    const bool last = (li + 1 == net.layer_count());
    if (!last || net.output == Output::bounded)
      for (int o = 0; o < out; ++o) delta[o] *= 1.0 - y[o] * y[o];

    auto& gw = grads.weights[li];
    auto& gb = grads.biases[li];
    std::vector<double> prev(in, 0.0);
    const double* w = net.weights[li].data();
    for (int o = 0; o < out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      double* grow = gw.data() + static_cast<size_t>(o) * in;
      const double* wrow = w + static_cast<size_t>(o) * in;
      for (int i = 0; i < in; ++i) {
        grow[i] += d * x[i];
        prev[i] += d * wrow[i];
      }
    }
    delta = std::move(prev);
  }
  return delta;
}

Grads gradients(const Mlp& net, std::span<const double> input, std::span<const double> upstream) {
  Trace trace;
  forward(net, input, trace);
  Grads g = Grads::zeros_like(net);
  g.input = backward(net, trace, upstream, g);
  return g;
}

AdamState AdamState::for_net(const Mlp& net, double lr_) {
  AdamState s;
  s.lr = lr_;
  for (size_t l = 0; l < net.weights.size(); ++l) {
    s.m_w.emplace_back(net.weights[l].size(), 0.0);
    s.v_w.emplace_back(net.weights[l].size(), 0.0);
    s.m_b.emplace_back(net.biases[l].size(), 0.0);
    s.v_b.emplace_back(net.biases[l].size(), 0.0);
  }
  return s;
}

namespace {
void adam_apply(std::vector<double>& theta, const std::vector<double>& g,
                std::vector<double>& m, std::vector<double>& v, const AdamState& s,
                double c1, double c2) {
  for (size_t i = 0; i < theta.size(); ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
    theta[i] -= s.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + s.eps);
  }
}
}  // namespace

bool optimizer_step(Mlp& net, const Grads& grads, AdamState& opt) {
  if (grads.weights.size() != net.weights.size())
    throw DimensionError("optimizer_step: gradient shape mismatch");
  if (!grads.finite()) {
    opt.skipped++;
    return false;
  }
  opt.step++;
  const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
  const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
  for (size_t l = 0; l < net.weights.size(); ++l) {
    adam_apply(net.weights[l], grads.weights[l], opt.m_w[l], opt.v_w[l], opt, c1, c2);
    adam_apply(net.biases[l], grads.biases[l], opt.m_b[l], opt.v_b[l], opt, c1, c2);
  }
  return true;
}

void soft_update(Mlp& target, const Mlp& online, double zeta) {
  if (!target.same_shape(online)) throw DimensionError("soft_update: shape mismatch");
  for (size_t l = 0; l < target.weights.size(); ++l) {
    for (size_t i = 0; i < target.weights[l].size(); ++i)
      target.weights[l][i] = (1.0 - zeta) * target.weights[l][i] + zeta * online.weights[l][i];
    for (size_t i = 0; i < target.biases[l].size(); ++i)
      target.biases[l][i] = (1.0 - zeta) * target.biases[l][i] + zeta * online.biases[l][i];
  }
}

}  // namespace swarm::nets
