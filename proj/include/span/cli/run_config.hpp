#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "span/train/sweep.hpp"
#include "span/train/synthetic.hpp"

namespace span::cli {

/// Invalid or incomplete run configuration; commands exit with status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SyntheticSpec {
  train::SyntheticKind kind = train::SyntheticKind::TriadicClosure;
  std::size_t nodes = 500;
  std::size_t snapshots = 6;
  std::uint64_t seed = 0;
};

/// One JSON file per run. Required keys: task, k, D, b, epochs, output_dir and
/// either dataset or synthetic. Unknown keys are rejected.
struct RunConfig {
  std::string dataset;     // edge list, or a graph cache written by `ingest`
  std::string node_types;  // optional sidecar of `node_id type_id` lines
  bool weighted = false;
  std::optional<SyntheticSpec> synthetic;
  train::TrainConfig train;
  std::filesystem::path output_dir;
  train::SweepGrid sweep;
  std::size_t repeats = 1;  // seeds per variant in `ablate`
  std::string checkpoint;   // `eval` input; defaults to <output_dir>/model.ckpt

  std::filesystem::path checkpoint_path() const;
};

RunConfig parse_run_config(const nlohmann::json& j);

/// Applies `key=value` overrides to a config document. The value is read as
/// JSON when it parses and as a string otherwise; dotted keys reach into
/// nested objects (synthetic.nodes).
void apply_override(nlohmann::json& j, const std::string& assignment);

RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace span::cli
