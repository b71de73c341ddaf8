#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "span/model/forward.hpp"

namespace span::train {

struct GradCheckOptions {
  std::size_t coordinates = 20;  // random coordinates across all parameters
  bool every_tensor = true;      // plus one random coordinate of every tensor
  double step = 1e-5;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
};

struct GradCheckEntry {
  std::string tensor;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckResult {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  bool passed = false;
};

/// |a - n| / max(|a|, |n|, 1e-5). Central differences at h = 1e-5 carry
/// roughly 1e-10 of rounding noise for losses of order one, so gradients below
/// 1e-5 are in effect compared with an absolute tolerance.
double relative_error(double analytic, double numeric);

/// Compares backprop gradients of the sample's summed loss against central
/// differences. Latent and type rows are only probed where the sample uses them.
GradCheckResult check_gradients(const model::SpanModel<double>& model, const model::EncodedSubgraph& sample,
                                const GradCheckOptions& options);

/// A fresh model with every non-embedding parameter perturbed: tower
/// parameters by N(0, 0.09 / rows), head parameters by N(0, 1 / D). At the
/// regular initialization many gradients sit near the finite-difference noise
/// floor, and the zero head scale blocks gradients to the towers entirely.
model::SpanModel<double> make_gradcheck_model(const model::ModelConfig& config, std::uint64_t seed);

/// A 4-node subgraph pair sampled from a random graph over config.num_nodes
/// nodes (at least 4), padded to config.max_nodes.
model::EncodedSubgraph make_gradcheck_sample(const model::ModelConfig& config, std::uint64_t seed);

}  // namespace span::train
