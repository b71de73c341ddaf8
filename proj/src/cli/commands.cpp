#include "span/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>

#include "span/cli/graph_cache.hpp"
#include "span/sampling/pair_io.hpp"
#include "span/tensor/checkpoint.hpp"
#include "span/train/gradcheck.hpp"
#include "span/train/metrics.hpp"

namespace span::cli {

namespace fs = std::filesystem;

namespace {

// Runs a command body and maps exceptions to exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void prepare_output(const RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  auto out = open_output(cfg.output_dir / "config.json");
  out << to_json(cfg).dump(2) << '\n';
}

train::Dataset build_dataset(const graph::DynamicGraph& g, const train::TrainConfig& cfg, bool with_train,
                             std::ostream& err) {
  auto data = cfg.task == train::Task::SubgraphPrediction ? train::build_subgraph_dataset(g, cfg, with_train)
                                                          : train::build_pattern_dataset(g, cfg, with_train);
  for (const auto& w : data.warnings) err << "warning: " << w << '\n';
  return data;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

RunConfig resolve_config(const CommonOptions& opts) {
  if (opts.config.empty()) throw ConfigError("--config is required");
  auto overrides = opts.overrides;
  if (opts.seed) overrides.push_back("seed=" + std::to_string(*opts.seed));
  if (opts.out) overrides.push_back("output_dir=" + nlohmann::json(*opts.out).dump());
  if (opts.threads) overrides.push_back("threads=" + std::to_string(*opts.threads));
  return load_run_config(opts.config, overrides);
}

graph::DynamicGraph load_graph(const RunConfig& cfg) {
  if (cfg.synthetic) {
    const auto& s = *cfg.synthetic;
    return train::generate_synthetic(s.kind, s.nodes, s.snapshots, s.seed);
  }
  graph::DynamicGraph g = is_graph_cache(cfg.dataset) ? load_graph_cache(cfg.dataset)
                                                      : graph::ingest_edge_list(cfg.dataset, cfg.weighted);
  if (!cfg.node_types.empty()) graph::load_node_types(g, fs::path(cfg.node_types));
  return g;
}

int cmd_ingest(const IngestOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.input.empty() || opts.out.empty()) throw ConfigError("ingest needs an input edge list and --out");
    auto g = graph::ingest_edge_list(opts.input, opts.weighted);
    if (!opts.node_types.empty()) graph::load_node_types(g, fs::path(opts.node_types));
    save_graph_cache(opts.out, g);
    out << "ingested " << g.num_nodes() << " nodes, " << g.num_edges() << " edges";
    if (g.dropped_self_loops()) out << " (" << g.dropped_self_loops() << " self-loops dropped)";
    out << " -> " << opts.out << '\n';
    return 0;
  });
}

int cmd_sample(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = resolve_config(opts);
    const auto g = load_graph(cfg);
    prepare_output(cfg);
    const auto& t = cfg.train;
    sampling::SamplerConfig scfg;
    scfg.max_nodes = static_cast<int>(t.k);
    scfg.jump_probability = t.alpha;
    scfg.seed = t.seed;

    auto file = open_output(cfg.output_dir / "pairs.txt");
    std::size_t written = 0;
    if (t.task == train::Task::SubgraphPrediction) {
      const auto snaps = graph::split_snapshots(g, t.snapshots);
      for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
        if (snaps[i].num_edges() == 0) {
          err << "warning: snapshot " << snaps[i].index() << " has no edges; skipped\n";
          continue;
        }
        auto pairs = sampling::sample_pairs(snaps[i], snaps[i + 1], scfg, t.pairs_per_snapshot, 0, t.threads);
        sampling::write_pairs(file, pairs);
        written += pairs.size();
      }
    } else {
      const auto [current, later] = graph::split_by_edge_fraction(g, 0.7);
      auto pairs = sampling::sample_pairs(current, later, scfg, t.pairs_per_snapshot, 0, t.threads);
      sampling::write_pairs(file, pairs);
      written = pairs.size();
    }
    out << "wrote " << written << " subgraph pairs to " << (cfg.output_dir / "pairs.txt").string() << '\n';
    return 0;
  });
}

int cmd_train(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = resolve_config(opts);
    const auto g = load_graph(cfg);
    prepare_output(cfg);
    const auto data = build_dataset(g, cfg.train, true, err);
    auto result = train::train_model(data, cfg.train, [&](const train::MetricsRecord& r) {
      out << "epoch " << r.epoch << " loss " << fixed(r.loss, 4) << " auc " << fixed(r.auc, 4) << '\n';
    });
    tensor::save_checkpoint(cfg.output_dir / "model.ckpt", result.model.named_parameters());
    train::write_metrics_csv(cfg.output_dir / "metrics.csv", result.metrics);
    auto pairs = open_output(cfg.output_dir / "test_pairs.txt");
    sampling::write_pairs(pairs, data.test_pairs);
    out << "test auc " << fixed(result.final.auc, 4) << ", " << result.model.param_count() << " parameters, outputs in "
        << cfg.output_dir.string() << '\n';
    return 0;
  });
}

int cmd_eval(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = resolve_config(opts);
    const auto g = load_graph(cfg);
    const auto data = build_dataset(g, cfg.train, false, err);
    model::SpanModel<float> m(cfg.train.model_config(data.num_nodes, data.num_types));
    auto params = m.named_parameters();
    tensor::restore_checkpoint(cfg.checkpoint_path(), params);
    const auto eval = train::evaluate(m, data.test, cfg.train.threads);

    fs::create_directories(cfg.output_dir);
    auto file = open_output(cfg.output_dir / "eval.csv");
    file << "auc,loss,predictions,degree_baseline_auc\n";
    file << fixed(eval.auc) << ',' << fixed(eval.loss) << ',' << eval.scores.size() << ',';
    if (data.task == train::Task::SubgraphPrediction) file << fixed(train::degree_product_baseline(data).auc);
    file << '\n';
    out << "test auc " << fixed(eval.auc, 4) << " over " << eval.scores.size() << " predictions\n";
    return 0;
  });
}

int cmd_ablate(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = resolve_config(opts);
    const auto g = load_graph(cfg);
    prepare_output(cfg);
    auto file = open_output(cfg.output_dir / "ablation.csv");
    file << "variant,auc_mean,auc_std,runs,params,seconds\n";
    for (int variant = 1; variant <= 4; ++variant) {
      std::vector<double> aucs;
      std::size_t params = 0;
      double seconds = 0.0;
      for (std::size_t r = 0; r < cfg.repeats; ++r) {
        auto t = cfg.train;
        t.variant = variant;
        t.seed = cfg.train.seed + r;
        const auto data = build_dataset(g, t, true, err);
        auto result = train::train_model(data, t);
        aucs.push_back(result.final.auc);
        params = result.model.param_count();
        seconds += result.metrics.back().seconds;
      }
      double mean = 0.0, var = 0.0;
      for (double a : aucs) mean += a;
      mean /= static_cast<double>(aucs.size());
      for (double a : aucs) var += (a - mean) * (a - mean);
      const double sd = aucs.size() > 1 ? std::sqrt(var / static_cast<double>(aucs.size() - 1)) : 0.0;
      file << variant << ',' << fixed(mean) << ',' << fixed(sd) << ',' << aucs.size() << ',' << params << ','
           << fixed(seconds, 3) << '\n';
      out << "variant " << variant << " auc " << fixed(mean, 4) << " +- " << fixed(sd, 4) << '\n';
    }
    return 0;
  });
}

int cmd_sweep(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = resolve_config(opts);
    const auto g = load_graph(cfg);
    prepare_output(cfg);
    std::size_t failures = 0;
    const auto runs = train::run_sweep(g, cfg.train, cfg.sweep, [&](const train::SweepRun& run) {
      out << "k=" << run.k << " D=" << run.dim << " b=" << run.blocks << ": ";
      if (run.error.empty()) {
        out << "auc " << fixed(run.metrics.back().auc, 4) << '\n';
      } else {
        out << "failed\n";
        err << "error: sweep point k=" << run.k << " D=" << run.dim << " b=" << run.blocks << ": " << run.error << '\n';
        ++failures;
      }
    });
    train::write_sweep_csv(cfg.output_dir / "sweep.csv", runs);
    return failures == 0 ? 0 : 1;
  });
}

int cmd_gradcheck(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = resolve_config(opts);
    prepare_output(cfg);
    auto file = open_output(cfg.output_dir / "gradcheck.csv");
    file << "head,tensor,index,analytic,numeric,rel_error\n";
    bool ok = true;
    for (auto task : {train::Task::SubgraphPrediction, train::Task::PatternPrediction}) {
      auto t = cfg.train;
      t.task = task;
      auto mcfg = t.model_config(8, task == train::Task::PatternPrediction ? 2 : 0);
      const auto model = train::make_gradcheck_model(mcfg, t.seed);
      const auto sample = train::make_gradcheck_sample(mcfg, t.seed);
      train::GradCheckOptions gopts;
      gopts.seed = t.seed;
      const auto result = train::check_gradients(model, sample, gopts);
      const auto head = model::to_string(mcfg.head);
      for (const auto& e : result.entries) {
        char line[256];
        std::snprintf(line, sizeof line, "%s,%s,%zu,%.10e,%.10e,%.3e", head.c_str(), e.tensor.c_str(), e.index,
                      e.analytic, e.numeric, e.rel_error);
        file << line << '\n';
      }
      out << head << ": " << result.entries.size() << " coordinates, max relative error "
          << result.max_rel_error << (result.passed ? " (ok)" : " (FAILED)") << '\n';
      if (!result.passed) {
        err << "error: " << head << " gradient check failed, max relative error " << result.max_rel_error << '\n';
        ok = false;
      }
    }
    return ok ? 0 : 1;
  });
}

}  // namespace span::cli
