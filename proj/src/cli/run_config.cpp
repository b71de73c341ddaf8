#include "span/cli/run_config.hpp"

#include <fstream>
#include <set>

namespace span::cli {

using nlohmann::json;

std::filesystem::path RunConfig::checkpoint_path() const {
  return checkpoint.empty() ? output_dir / "model.ckpt" : std::filesystem::path(checkpoint);
}

namespace {

const std::set<std::string> kTopKeys = {
    "dataset", "node_types", "weighted", "synthetic", "task",       "pattern",   "k",
    "D",       "b",          "h",        "ffn_dim",   "lr",         "epochs",    "snapshots",
    "pairs_per_snapshot",    "test_pairs", "batch_size", "alpha",   "seed",      "variant",
    "threads", "shuffle_labels", "output_dir", "sweep", "repeats",  "checkpoint"};
const std::set<std::string> kSyntheticKeys = {"kind", "nodes", "snapshots", "seed"};
const std::set<std::string> kSweepKeys = {"k", "D", "b"};

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& where = "") {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + where + key + "' has the wrong type");
  }
}

std::size_t get_count(const json& obj, const std::string& key, const std::string& where = "") {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("config key '" + where + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

template <typename Field>
void optional_count(const json& j, const std::string& key, Field& field) {
  if (j.contains(key)) field = get_count(j, key);
}

std::vector<std::size_t> get_counts(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_array()) throw ConfigError("config key '" + where + key + "' must be a list of integers");
  std::vector<std::size_t> out;
  for (const auto& x : v) {
    if (!x.is_number_integer() || x.get<long long>() <= 0) {
      throw ConfigError("config key '" + where + key + "' must hold positive integers");
    }
    out.push_back(x.get<std::size_t>());
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  reject_unknown(j, kTopKeys, "");
  for (const char* key : {"task", "k", "D", "b", "epochs", "output_dir"}) {
    if (!j.contains(key)) throw ConfigError(std::string("missing required config key '") + key + "'");
  }
  if (!j.contains("dataset") && !j.contains("synthetic")) {
    throw ConfigError("missing required config key 'dataset' (or 'synthetic')");
  }
  if (j.contains("dataset") && j.contains("synthetic")) {
    throw ConfigError("config keys 'dataset' and 'synthetic' are mutually exclusive");
  }

  RunConfig cfg;
  auto& t = cfg.train;
  try {
    t.task = train::task_from_string(get<std::string>(j, "task"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config key 'task': ") + e.what());
  }
  t.k = get_count(j, "k");
  t.dim = get_count(j, "D");
  t.blocks = get_count(j, "b");
  t.epochs = get_count(j, "epochs");
  cfg.output_dir = get<std::string>(j, "output_dir");

  if (j.contains("dataset")) cfg.dataset = get<std::string>(j, "dataset");
  if (j.contains("node_types")) cfg.node_types = get<std::string>(j, "node_types");
  if (j.contains("weighted")) cfg.weighted = get<bool>(j, "weighted");
  if (j.contains("synthetic")) {
    const auto& s = j.at("synthetic");
    if (!s.is_object()) throw ConfigError("config key 'synthetic' must be an object");
    reject_unknown(s, kSyntheticKeys, "synthetic.");
    if (!s.contains("kind")) throw ConfigError("missing required config key 'synthetic.kind'");
    SyntheticSpec spec;
    try {
      spec.kind = train::synthetic_kind_from_string(get<std::string>(s, "kind", "synthetic."));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config key 'synthetic.kind': ") + e.what());
    }
    if (s.contains("nodes")) spec.nodes = get_count(s, "nodes", "synthetic.");
    if (s.contains("snapshots")) spec.snapshots = get_count(s, "snapshots", "synthetic.");
    if (s.contains("seed")) spec.seed = get<std::uint64_t>(s, "seed", "synthetic.");
    cfg.synthetic = spec;
    t.snapshots = spec.snapshots;
  }

  if (j.contains("pattern")) {
    try {
      t.pattern = train::PatternSpec::parse(get<std::string>(j, "pattern"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config key 'pattern': ") + e.what());
    }
  }
  optional_count(j, "h", t.heads);
  optional_count(j, "ffn_dim", t.ffn_dim);
  optional_count(j, "snapshots", t.snapshots);
  optional_count(j, "pairs_per_snapshot", t.pairs_per_snapshot);
  optional_count(j, "test_pairs", t.test_pairs);
  optional_count(j, "batch_size", t.batch_size);
  optional_count(j, "repeats", cfg.repeats);
  if (j.contains("lr")) t.lr = get<double>(j, "lr");
  if (j.contains("alpha")) t.alpha = get<double>(j, "alpha");
  if (j.contains("seed")) t.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("variant")) t.variant = get<int>(j, "variant");
  if (j.contains("threads")) t.threads = static_cast<unsigned>(get_count(j, "threads"));
  if (j.contains("shuffle_labels")) t.shuffle_labels = get<bool>(j, "shuffle_labels");
  if (j.contains("checkpoint")) cfg.checkpoint = get<std::string>(j, "checkpoint");
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (!s.is_object()) throw ConfigError("config key 'sweep' must be an object");
    reject_unknown(s, kSweepKeys, "sweep.");
    if (s.contains("k")) cfg.sweep.k = get_counts(s, "k", "sweep.");
    if (s.contains("D")) cfg.sweep.dim = get_counts(s, "D", "sweep.");
    if (s.contains("b")) cfg.sweep.blocks = get_counts(s, "b", "sweep.");
  }

  if (cfg.repeats == 0) throw ConfigError("config key 'repeats' must be positive");
  if (cfg.output_dir.empty()) throw ConfigError("config key 'output_dir' must not be empty");
  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  if (value.is_structured()) throw ConfigError("override '" + key + "' must be a scalar");

  json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    if (!node->is_object()) throw ConfigError("override '" + key + "' goes through a non-object");
    start = dot + 1;
  }
}

RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file " + path.string() + " is not valid JSON");
  for (const auto& o : overrides) apply_override(j, o);
  return parse_run_config(j);
}

json to_json(const RunConfig& cfg) {
  const auto& t = cfg.train;
  json j;
  if (cfg.synthetic) {
    j["synthetic"] = {{"kind", train::to_string(cfg.synthetic->kind)},
                      {"nodes", cfg.synthetic->nodes},
                      {"snapshots", cfg.synthetic->snapshots},
                      {"seed", cfg.synthetic->seed}};
  } else {
    j["dataset"] = cfg.dataset;
    if (!cfg.node_types.empty()) j["node_types"] = cfg.node_types;
    j["weighted"] = cfg.weighted;
  }
  j["task"] = train::to_string(t.task);
  if (t.pattern) j["pattern"] = t.pattern->to_string();
  j["k"] = t.k;
  j["D"] = t.dim;
  j["b"] = t.blocks;
  j["h"] = t.heads;
  j["ffn_dim"] = t.ffn_dim;
  j["lr"] = t.lr;
  j["epochs"] = t.epochs;
  j["snapshots"] = t.snapshots;
  j["pairs_per_snapshot"] = t.pairs_per_snapshot;
  j["test_pairs"] = t.test_pairs;
  j["batch_size"] = t.batch_size;
  j["alpha"] = t.alpha;
  j["seed"] = t.seed;
  j["variant"] = t.variant;
  j["threads"] = t.threads;
  j["shuffle_labels"] = t.shuffle_labels;
  j["output_dir"] = cfg.output_dir.string();
  j["repeats"] = cfg.repeats;
  if (!cfg.checkpoint.empty()) j["checkpoint"] = cfg.checkpoint;
  if (!cfg.sweep.k.empty() || !cfg.sweep.dim.empty() || !cfg.sweep.blocks.empty()) {
    j["sweep"] = {{"k", cfg.sweep.k}, {"D", cfg.sweep.dim}, {"b", cfg.sweep.blocks}};
  }
  return j;
}

}  // namespace span::cli
