#pragma once

#include <filesystem>

#include "fmfusion/nn/train.hpp"

namespace fmfusion::nn {

/// Versioned structured-text dump of the spec, the training log, and every
/// buffer (weights, biases, batch-norm statistics). Values are written as
/// C hexfloats, so save -> load -> save is byte-identical and parameters
/// round-trip bit-exactly.
void save_model(const TrainedModel& tm, const std::filesystem::path& path);

TrainedModel load_model(const std::filesystem::path& path);

}  // namespace fmfusion::nn
