#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "span/train/trainer.hpp"

namespace span::train {

/// Values to cross; an empty axis keeps the base config's value.
struct SweepGrid {
  std::vector<std::size_t> k;
  std::vector<std::size_t> dim;
  std::vector<std::size_t> blocks;
};

struct SweepRun {
  std::size_t k = 0, dim = 0, blocks = 0, heads = 0;
  std::vector<MetricsRecord> metrics;
  std::string error;  // empty when the run succeeded
};

/// Trains one model per grid point on `g`. A failing point records its error
/// and the sweep moves on.
std::vector<SweepRun> run_sweep(const graph::DynamicGraph& g, const TrainConfig& base, const SweepGrid& grid,
                                const std::function<void(const SweepRun&)>& on_run = {});

/// Metrics CSV with k,D,b,h appended; failed runs have no rows.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRun>& runs);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRun>& runs);

}  // namespace span::train
