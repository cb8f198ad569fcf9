#include "swarm/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "swarm/errors.hpp"

namespace swarm::checkpoint {

namespace {

constexpr char kMagic[4] = {'S', 'W', 'P', 'C'};

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw CheckpointError("corrupt checkpoint: truncated file");
  return v;
}

void write_string(std::ostream& out, const std::string& s) {
  write_pod<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  const uint32_t len = read_pod<uint32_t>(in);
  if (len > (1u << 24)) throw CheckpointError("corrupt checkpoint: implausible string length");
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw CheckpointError("corrupt checkpoint: truncated string");
  return s;
}

}  // namespace

void Checkpoint::add_tensor(const std::string& name, Tensor t) {
  uint64_t n = 1;
  for (uint64_t d : t.dims) n *= d;
  if (n != t.data.size()) throw CheckpointError("tensor dims do not match data size: " + name);
  tensors.emplace_back(name, std::move(t));
}

const Tensor& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return t;
  throw CheckpointError("missing tensor: " + name);
}

bool Checkpoint::has_tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return true;
  return false;
}

void save(const Checkpoint& ck, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
  out.write(kMagic, 4);
  write_pod<uint32_t>(out, ck.version);
  write_string(out, ck.mode);
  write_string(out, ck.layout);
  write_pod<uint64_t>(out, ck.config_hash);
  write_string(out, ck.config_text);
  write_pod<uint64_t>(out, ck.episode);
  for (uint64_t w : ck.rng_state) write_pod<uint64_t>(out, w);
  write_pod<uint32_t>(out, static_cast<uint32_t>(ck.tensors.size()));
  for (const auto& [name, t] : ck.tensors) {
    write_string(out, name);
    write_pod<uint32_t>(out, static_cast<uint32_t>(t.dims.size()));
    for (uint64_t d : t.dims) write_pod<uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  }
  if (!out) throw IoError("checkpoint write failed: " + path.string());
}

Checkpoint load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw CheckpointError("corrupt checkpoint: bad magic");

  Checkpoint ck;
  ck.version = read_pod<uint32_t>(in);
  if (ck.version != 1)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(ck.version));
  ck.mode = read_string(in);
  ck.layout = read_string(in);
  ck.config_hash = read_pod<uint64_t>(in);
  ck.config_text = read_string(in);
  ck.episode = read_pod<uint64_t>(in);
  for (auto& w : ck.rng_state) w = read_pod<uint64_t>(in);

  const uint32_t count = read_pod<uint32_t>(in);
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = read_string(in);
    Tensor t;
    const uint32_t rank = read_pod<uint32_t>(in);
    if (rank > 8) throw CheckpointError("corrupt checkpoint: implausible tensor rank");
    uint64_t n = 1;
    for (uint32_t r = 0; r < rank; ++r) {
      t.dims.push_back(read_pod<uint64_t>(in));
      n *= t.dims.back();
    }
    if (n > (1ull << 28)) throw CheckpointError("corrupt checkpoint: implausible tensor size");
    t.data.resize(n);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw CheckpointError("corrupt checkpoint: truncated tensor data");
    ck.tensors.emplace_back(std::move(name), std::move(t));
  }
  return ck;
}

void add_mlp(Checkpoint& ck, const std::string& prefix, const nets::Mlp& net) {
  Tensor meta;
  meta.dims = {net.layer_sizes.size() + 1};
  for (int s : net.layer_sizes) meta.data.push_back(static_cast<double>(s));
  meta.data.push_back(net.output == nets::Output::bounded ? 1.0 : 0.0);
  ck.add_tensor(prefix + "/meta", std::move(meta));
  for (size_t l = 0; l < net.weights.size(); ++l) {
    Tensor w;
    w.dims = {static_cast<uint64_t>(net.layer_sizes[l + 1]),
              static_cast<uint64_t>(net.layer_sizes[l])};
    w.data = net.weights[l];
    ck.add_tensor(prefix + "/w" + std::to_string(l), std::move(w));
    Tensor b;
    b.dims = {static_cast<uint64_t>(net.layer_sizes[l + 1])};
    b.data = net.biases[l];
    ck.add_tensor(prefix + "/b" + std::to_string(l), std::move(b));
  }
}

nets::Mlp read_mlp(const Checkpoint& ck, const std::string& prefix) {
  const Tensor& meta = ck.tensor(prefix + "/meta");
  if (meta.data.size() < 3) throw CheckpointError("bad mlp meta tensor: " + prefix);
  std::vector<int> sizes;
  for (size_t i = 0; i + 1 < meta.data.size(); ++i) sizes.push_back(static_cast<int>(meta.data[i]));
  const auto output = meta.data.back() > 0.5 ? nets::Output::bounded : nets::Output::identity;

  nets::Mlp net = nets::Mlp::zeros(sizes, output);
  for (size_t l = 0; l < net.weights.size(); ++l) {
    const Tensor& w = ck.tensor(prefix + "/w" + std::to_string(l));
    const Tensor& b = ck.tensor(prefix + "/b" + std::to_string(l));
    if (w.data.size() != net.weights[l].size() || b.data.size() != net.biases[l].size())
      throw CheckpointError("mlp tensor shape mismatch: " + prefix);
    net.weights[l] = w.data;
    net.biases[l] = b.data;
  }
  return net;
}

}  // namespace swarm::checkpoint
