#pragma once

#include "scr/nn/tensor.hpp"

namespace scr::nn {

inline constexpr double multinomial_floor = 1e-10;
inline constexpr double bce_clamp = 1e-7;

/// Diagonal Gaussian parameters, one row per user. Variance is stored as log-variance.
struct GaussianParams {
    Tensor2 mu;
    Tensor2 log_var;

    GaussianParams() = default;
    GaussianParams(Tensor2 mu_, Tensor2 log_var_);

    std::size_t rows() const noexcept { return mu.rows(); }
    std::size_t dim() const noexcept { return mu.cols(); }
};

/// −Σ targets·log(probs + 1e-10). Rows of `probs` must sum to 1 within 1e-6.
double multinomial_nll(const Tensor2& targets, const Tensor2& probs);

/// d multinomial_nll / d probs.
Tensor2 multinomial_nll_grad(const Tensor2& targets, const Tensor2& probs);

/// KL(q ‖ N(0, I)) = 0.5·Σ (μ² + σ² − 1 − log σ²), summed over rows and dims.
double gaussian_kl(const GaussianParams& params);

/// Gradients of gaussian_kl with respect to μ and log σ².
GaussianParams gaussian_kl_grad(const GaussianParams& params);

/// Σ of independent per-entry Bernoulli cross-entropies; probs clamped to [1e-7, 1 − 1e-7].
double multilabel_bce(const Tensor2& targets, const Tensor2& probs);

/// d multilabel_bce / d probs (zero where the clamp is active).
Tensor2 multilabel_bce_grad(const Tensor2& targets, const Tensor2& probs);

} // namespace scr::nn
