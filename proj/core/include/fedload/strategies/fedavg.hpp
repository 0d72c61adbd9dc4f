#pragma once

#include <span>

#include "fedload/nn/models.hpp"

namespace fedload::strategies {

// Element-wise unweighted mean of parameter sets with identical block
// layouts, written into `out`. Each element's values are summed in sorted
// order, so the result does not depend on input order, and a value shared by
// every input is returned unchanged. Throws ContractError on an empty list or
// mismatched shapes.
void average_blocks(std::span<const nn::ConstParamBlocks> inputs, const nn::ParamBlocks& out);

nn::PredictorParams fedavg_aggregate(std::span<const nn::PredictorParams> models);
nn::LinearLayer fedavg_heads(std::span<const nn::LinearLayer> heads);

}  // namespace fedload::strategies
