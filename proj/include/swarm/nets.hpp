#pragma once

#include <span>
#include <vector>

#include "swarm/rng.hpp"

namespace swarm::nets {

enum class Output { identity, bounded };  // bounded = tanh on the last layer

// Fully connected network with tanh hidden layers. Weights are row-major
// (out x in) per layer.
struct Mlp {
  std::vector<int> layer_sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  Output output = Output::identity;

  static Mlp init(std::vector<int> sizes, Output output, Rng& rng);
  static Mlp zeros(std::vector<int> sizes, Output output);

  int in_dim() const { return layer_sizes.front(); }
  int out_dim() const { return layer_sizes.back(); }
  size_t layer_count() const { return weights.size(); }
  size_t param_count() const;
  bool same_shape(const Mlp& o) const;
};

// Per-layer activations recorded during a forward pass; acts[0] is the input
// and acts[l+1] the post-activation output of layer l.
struct Trace {
  std::vector<std::vector<double>> acts;
};

struct Grads {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  std::vector<double> input;  // gradient w.r.t. the network input

  static Grads zeros_like(const Mlp& net);
  void accumulate(const Grads& o);
  void scale(double s);
  bool finite() const;
};

std::vector<double> forward(const Mlp& net, std::span<const double> input);
std::vector<double> forward(const Mlp& net, std::span<const double> input, Trace& trace);

// Reverse-mode gradients of forward under the given output cotangent.
Grads gradients(const Mlp& net, std::span<const double> input, std::span<const double> upstream);

// Same, reusing a recorded trace; accumulates into grads (input gradient is
// returned, not accumulated).
std::vector<double> backward(const Mlp& net, const Trace& trace,
                             std::span<const double> upstream, Grads& grads);

// Adaptive-moment optimizer state (first/second moment accumulators with
// bias correction).
struct AdamState {
  std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long skipped = 0;  // non-finite gradient events

  static AdamState for_net(const Mlp& net, double lr);
};

// Applies one optimizer step. Returns false (parameters untouched, event
// counted) when the gradients contain non-finite values.
bool optimizer_step(Mlp& net, const Grads& grads, AdamState& opt);

// target <- (1 - zeta) * target + zeta * online, elementwise.
void soft_update(Mlp& target, const Mlp& online, double zeta);

}  // namespace swarm::nets
