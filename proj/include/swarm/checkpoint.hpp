#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "swarm/nets.hpp"

namespace swarm::checkpoint {

struct Tensor {
  std::vector<uint64_t> dims;
  std::vector<double> data;
};

// Self-contained training snapshot. Binary little-endian layout:
//   magic "SWPC", u32 format version,
//   string mode, string obs layout, u64 config hash, string config text,
//   u64 episode, 4 x u64 rng state,
//   u32 tensor count, then per tensor: string name, u32 rank, u64 dims[],
//   f64 data[]. Strings are u32 length + bytes.
struct Checkpoint {
  uint32_t version = 1;
  std::string mode;
  std::string layout;
  uint64_t config_hash = 0;
  std::string config_text;
  uint64_t episode = 0;
  std::array<uint64_t, 4> rng_state{};
  std::vector<std::pair<std::string, Tensor>> tensors;

  void add_tensor(const std::string& name, Tensor t);
  const Tensor& tensor(const std::string& name) const;  // throws CheckpointError
  bool has_tensor(const std::string& name) const;
};

void save(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load(const std::filesystem::path& path);

// Network (de)serialization helpers; meta carries layer sizes and the
// output activation kind.
void add_mlp(Checkpoint& ck, const std::string& prefix, const nets::Mlp& net);
nets::Mlp read_mlp(const Checkpoint& ck, const std::string& prefix);

}  // namespace swarm::checkpoint
