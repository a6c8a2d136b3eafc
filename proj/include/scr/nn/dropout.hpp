#pragma once

#include "scr/core/rng.hpp"
#include "scr/nn/tensor.hpp"

namespace scr::nn {

/// Inverted-dropout mask: each entry is 0 with probability `rate`, else 1/(1 − rate).
Tensor2 dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng);

/// Element-wise x ∘ mask.
void apply_mask(Tensor2& x, const Tensor2& mask);

/// Training mode draws and applies a mask; inference returns `x` unchanged.
Tensor2 dropout(const Tensor2& x, double rate, Rng& rng, bool training);

} // namespace scr::nn
