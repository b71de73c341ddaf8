#include "span/train/sweep.hpp"

#include <fstream>

#include "span/train/metrics.hpp"

namespace span::train {

std::vector<SweepRun> run_sweep(const graph::DynamicGraph& g, const TrainConfig& base, const SweepGrid& grid,
                                const std::function<void(const SweepRun&)>& on_run) {
  auto axis = [](const std::vector<std::size_t>& v, std::size_t fallback) {
    return v.empty() ? std::vector<std::size_t>{fallback} : v;
  };
  std::vector<SweepRun> runs;
  for (auto k : axis(grid.k, base.k)) {
    for (auto d : axis(grid.dim, base.dim)) {
      for (auto b : axis(grid.blocks, base.blocks)) {
        TrainConfig cfg = base;
        cfg.k = k;
        cfg.dim = d;
        cfg.blocks = b;
        SweepRun run{k, d, b, cfg.heads, {}, {}};
        try {
          auto result = cfg.task == Task::SubgraphPrediction ? train_subgraph_prediction(g, cfg)
                                                             : train_pattern_prediction(g, cfg);
          run.metrics = std::move(result.metrics);
        } catch (const std::exception& e) {
          run.error = e.what();
        }
        if (on_run) on_run(run);
        runs.push_back(std::move(run));
      }
    }
  }
  return runs;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRun>& runs) {
  out << "epoch,loss,auc,seconds,params,k,D,b,h\n";
  for (const auto& run : runs) {
    for (const auto& r : run.metrics) {
      write_metrics_fields(out, r);
      out << ',' << run.k << ',' << run.dim << ',' << run.blocks << ',' << run.heads << '\n';
    }
  }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRun>& runs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_sweep_csv(out, runs);
}

}  // namespace span::train
