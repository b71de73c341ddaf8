#pragma once

#include <filesystem>
#include <ostream>
#include <span>

#include "span/train/trainer.hpp"

namespace span::train {

/// Header `epoch,loss,auc,seconds,params`, one row per epoch.
void write_metrics_csv(std::ostream& out, std::span<const MetricsRecord> records);
void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRecord> records);

/// Fixed-precision CSV fields shared by the metric writers.
void write_metrics_fields(std::ostream& out, const MetricsRecord& r);

}  // namespace span::train
