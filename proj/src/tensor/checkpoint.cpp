#include "span/tensor/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

namespace span::tensor {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'C', 'K'};

template <typename U>
void put(std::ostream& out, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U get(std::istream& in) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) throw CheckpointError("checkpoint truncated");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

template <typename Real>
void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor<Real>>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint32_t>(out, 2);
    put<std::uint64_t>(out, t.rows());
    put<std::uint64_t>(out, t.cols());
    for (Real v : t.values()) put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
}

std::vector<NamedTensor<float>> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw CheckpointError(path.string() + " is not a checkpoint (bad magic)");
  }
  auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported");
  }
  auto count = get<std::uint32_t>(in);
  std::vector<NamedTensor<float>> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto len = get<std::uint32_t>(in);
    if (len > (1u << 16)) throw CheckpointError("checkpoint tensor name too long");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw CheckpointError("checkpoint truncated");
    auto rank = get<std::uint32_t>(in);
    if (rank == 0 || rank > 2) throw CheckpointError("unsupported tensor rank " + std::to_string(rank));
    std::uint64_t dims[2] = {1, 1};
    for (std::uint32_t r = 0; r < rank; ++r) dims[r + (2 - rank)] = get<std::uint64_t>(in);
    if (dims[0] * dims[1] > (std::uint64_t{1} << 34)) throw CheckpointError("checkpoint tensor too large");
    std::vector<float> values(dims[0] * dims[1]);
    for (auto& v : values) v = std::bit_cast<float>(get<std::uint32_t>(in));
    out.push_back({std::move(name), Tensor<float>::from_values(dims[0], dims[1], std::move(values))});
  }
  return out;
}

template <typename Real>
void restore_checkpoint(const std::filesystem::path& path, std::vector<NamedTensor<Real>>& targets) {
  auto loaded = load_checkpoint(path);
  std::map<std::string, const Tensor<float>*> by_name;
  for (const auto& nt : loaded) by_name[nt.name] = &nt.tensor;
  if (by_name.size() != targets.size()) {
    throw CheckpointError("checkpoint holds " + std::to_string(by_name.size()) + " tensors, model expects " +
                          std::to_string(targets.size()));
  }
  for (auto& [name, t] : targets) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw CheckpointError("checkpoint is missing tensor '" + name + "'");
    if (it->second->shape() != t.shape()) {
      throw CheckpointError("tensor '" + name + "' has shape " + to_string(it->second->shape()) + ", expected " +
                            to_string(t.shape()));
    }
    auto src = it->second->values();
    auto dst = t.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<Real>(src[i]);
  }
}

template void save_checkpoint<float>(const std::filesystem::path&, const std::vector<NamedTensor<float>>&);
template void save_checkpoint<double>(const std::filesystem::path&, const std::vector<NamedTensor<double>>&);
template void restore_checkpoint<float>(const std::filesystem::path&, std::vector<NamedTensor<float>>&);
template void restore_checkpoint<double>(const std::filesystem::path&, std::vector<NamedTensor<double>>&);

}  // namespace span::tensor
