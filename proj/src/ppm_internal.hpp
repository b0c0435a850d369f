#pragma once

#include <memory>
#include <span>

#include "bpseval/ppm.hpp"

namespace bpseval::detail {

std::unique_ptr<Predictor> train_frequency_baseline(Task task, std::span<const PrefixSample> samples);

std::unique_ptr<Predictor> train_mlp(const PredictorSpec& spec, std::span<const PrefixSample> samples,
                                     const Vocabulary& vocab);

}  // namespace bpseval::detail
