#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace span::train {

/// Area under the ROC curve from the Mann-Whitney statistic: the fraction of
/// (positive, negative) pairs where the positive scores higher, ties counting
/// one half. Labels are 0 or 1; both classes must be present.
double evaluate_auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace span::train
