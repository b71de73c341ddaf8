#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "span/tensor/tensor.hpp"

namespace span::tensor {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layout, all integers little-endian:
//   "SPCK" | u32 version | u32 tensor count
//   per tensor: u32 name length | name bytes | u32 rank | u64 dims[rank] | f32 data[prod(dims)]
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <typename Real>
void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor<Real>>& tensors);

std::vector<NamedTensor<float>> load_checkpoint(const std::filesystem::path& path);

/// Copies checkpoint values into `targets`, matching by name and shape.
template <typename Real>
void restore_checkpoint(const std::filesystem::path& path, std::vector<NamedTensor<Real>>& targets);

}  // namespace span::tensor
