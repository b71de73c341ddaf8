#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "span/cli/run_config.hpp"

namespace span::cli {

/// Flags shared by the config-driven commands; set values override the file.
struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::vector<std::string> overrides;  // key=value
};

struct IngestOptions {
  std::string input;
  std::string out;
  std::string node_types;
  bool weighted = false;
};

/// Each returns the process exit status: 0 success, 1 runtime failure, 2 config
/// error. Diagnostics go to `err` as one line per failure.
int cmd_ingest(const IngestOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sample(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_train(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_eval(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_ablate(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const CommonOptions& opts, std::ostream& out, std::ostream& err);

/// Resolves the config file plus flag overrides.
RunConfig resolve_config(const CommonOptions& opts);

/// The run's graph: synthetic, a graph cache, or a parsed edge list (plus the
/// node-type sidecar when configured).
graph::DynamicGraph load_graph(const RunConfig& cfg);

}  // namespace span::cli
