// span: sampling, training and evaluation of subgraph evolution models.
#include <iostream>

#include "CLI11.hpp"
#include "span/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace span::cli;
  CLI::App app{"Subgraph evolution and pattern prediction on dynamic graphs"};
  app.require_subcommand(1);

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse an edge list into a binary graph cache");
  ingest_cmd->add_option("input", ingest.input, "Edge list: `src dst time` or `src dst weight time` per line")
      ->required();
  ingest_cmd->add_option("--out", ingest.out, "Cache file to write")->required();
  ingest_cmd->add_option("--types", ingest.node_types, "Node-type sidecar: `node_id type_id` per line");
  ingest_cmd->add_flag("--weighted", ingest.weighted, "Use the weight column of 4-field lines");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const CommonOptions&, std::ostream&, std::ostream&);
  };
  const Command commands[] = {
      {"sample", "Write sampled subgraph pairs", cmd_sample},
      {"train", "Train a model; writes model.ckpt, metrics.csv, test_pairs.txt", cmd_train},
      {"eval", "Evaluate a checkpoint on the test pairs; writes eval.csv", cmd_eval},
      {"ablate", "Train variants 1-4; writes ablation.csv", cmd_ablate},
      {"sweep", "Train over the configured k/D/b grid; writes sweep.csv", cmd_sweep},
      {"gradcheck", "Finite-difference check of both heads; writes gradcheck.csv", cmd_gradcheck},
  };
  CommonOptions common;
  std::uint64_t seed = 0;
  std::string out_dir;
  unsigned threads = 1;
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", common.config, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out", out_dir, "Override the output directory");
    sub->add_option("--threads", threads, "Worker threads for sampling and evaluation")
        ->check(CLI::PositiveNumber);
    sub->add_option("--set", common.overrides, "Override a scalar config key (key=value)");
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (ingest_cmd->parsed()) return cmd_ingest(ingest, std::cout, std::cerr);
  for (auto [sub, c] : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) common.seed = seed;
    if (sub->count("--out")) common.out = out_dir;
    if (sub->count("--threads")) common.threads = threads;
    return c->run(common, std::cout, std::cerr);
  }
  return 2;
}
