#pragma once

#include <filesystem>
#include <stdexcept>

#include "span/graph/temporal_graph.hpp"

namespace span::cli {

class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layout, little-endian:
//   "SPGC" | u32 version | u64 nodes | u64 edges | u64 dropped self-loops
//   | i64 original id per node | per edge: u32 src, u32 dst, f64 weight, f64 time
//   | u8 has types | i32 type per node (when present)
inline constexpr std::uint32_t kGraphCacheVersion = 1;

void save_graph_cache(const std::filesystem::path& path, const graph::DynamicGraph& g);
graph::DynamicGraph load_graph_cache(const std::filesystem::path& path);

/// True when the file starts with the cache magic.
bool is_graph_cache(const std::filesystem::path& path);

}  // namespace span::cli
