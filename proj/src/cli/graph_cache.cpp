#include "span/cli/graph_cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace span::cli {

static_assert(std::endian::native == std::endian::little, "graph cache assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'S', 'P', 'G', 'C'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

// Bounds-checked cursor over the whole file.
class Reader {
 public:
  Reader(std::vector<char> bytes, const std::filesystem::path& path) : bytes_(std::move(bytes)), path_(path) {}

  template <typename T>
  T take() {
    T v{};
    need(sizeof v);
    std::memcpy(&v, bytes_.data() + pos_, sizeof v);
    pos_ += sizeof v;
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw CacheError("graph cache " + path_.string() + " is truncated");
  }

  std::vector<char> bytes_;
  std::size_t pos_ = 0;
  const std::filesystem::path& path_;
};

}  // namespace

void save_graph_cache(const std::filesystem::path& path, const graph::DynamicGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CacheError("cannot write graph cache " + path.string());
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kGraphCacheVersion);
  put<std::uint64_t>(out, g.num_nodes());
  put<std::uint64_t>(out, g.num_edges());
  put<std::uint64_t>(out, g.dropped_self_loops());
  for (auto id : g.original_ids()) put<std::int64_t>(out, id);
  for (const auto& e : g.edges()) {
    put<std::uint32_t>(out, e.src);
    put<std::uint32_t>(out, e.dst);
    put<double>(out, e.weight);
    put<double>(out, e.timestamp);
  }
  put<std::uint8_t>(out, g.has_types() ? 1 : 0);
  for (int t : g.node_types()) put<std::int32_t>(out, t);
  if (!out) throw CacheError("failed writing graph cache " + path.string());
}

graph::DynamicGraph load_graph_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError("cannot open graph cache " + path.string());
  std::vector<char> bytes(std::filesystem::file_size(path));
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw CacheError("cannot read graph cache " + path.string());
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw CacheError(path.string() + " is not a graph cache (bad magic bytes)");
  }
  Reader r(std::move(bytes), path);
  r.take<std::uint32_t>();
  const auto version = r.take<std::uint32_t>();
  if (version != kGraphCacheVersion) {
    throw CacheError("graph cache " + path.string() + " has version " + std::to_string(version) + ", expected " +
                     std::to_string(kGraphCacheVersion));
  }
  const auto nodes = r.take<std::uint64_t>();
  const auto edges = r.take<std::uint64_t>();
  const auto dropped = r.take<std::uint64_t>();
  // Reject sizes the file cannot possibly hold before allocating.
  if (nodes > r.remaining() / 8 || edges > r.remaining() / 24) {
    throw CacheError("graph cache " + path.string() + " is corrupt");
  }

  std::vector<std::int64_t> ids(nodes);
  for (auto& id : ids) id = r.take<std::int64_t>();
  std::vector<graph::TemporalEdge> list(edges);
  for (auto& e : list) {
    e.src = r.take<std::uint32_t>();
    e.dst = r.take<std::uint32_t>();
    e.weight = r.take<double>();
    e.timestamp = r.take<double>();
  }
  const auto has_types = r.take<std::uint8_t>();
  std::vector<int> types;
  if (has_types) {
    types.resize(nodes);
    for (auto& t : types) t = r.take<std::int32_t>();
  }
  try {
    graph::DynamicGraph g(std::move(list), nodes, std::move(ids));
    g.set_dropped_self_loops(dropped);
    if (has_types) g.set_node_types(std::move(types));
    return g;
  } catch (const std::invalid_argument& e) {
    throw CacheError("graph cache " + path.string() + " is corrupt: " + e.what());
  }
}

bool is_graph_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  return in.read(magic, 4) && std::memcmp(magic, kMagic, 4) == 0;
}

}  // namespace span::cli
