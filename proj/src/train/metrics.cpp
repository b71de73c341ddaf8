#include "span/train/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace span::train {

void write_metrics_fields(std::ostream& out, const MetricsRecord& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.3f,%zu", r.epoch, r.loss, r.auc, r.seconds, r.params);
  out << buf;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRecord> records) {
  out << "epoch,loss,auc,seconds,params\n";
  for (const auto& r : records) {
    write_metrics_fields(out, r);
    out << '\n';
  }
}

void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRecord> records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_metrics_csv(out, records);
}

}  // namespace span::train
