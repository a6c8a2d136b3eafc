#pragma once

#include "scr/nn/layer.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace scr::nn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Moment estimates for one parameter block.
struct AdamState {
    std::size_t step = 0;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    AdamConfig config;

    AdamState() = default;
    AdamState(std::size_t size, AdamConfig cfg);
};

/// One bias-corrected Adam update of `params` in place. Throws NumericError on a non-finite gradient.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

/// Adam over a fixed list of parameter blocks; one AdamState per block, all stepped together.
class AdamOptimizer {
public:
    explicit AdamOptimizer(AdamConfig config = {});

    void step(const std::vector<ParamRef>& params, const std::vector<std::span<const double>>& grads);

    std::size_t steps_taken() const noexcept { return states_.empty() ? 0 : states_.front().step; }

private:
    AdamConfig config_;
    std::vector<AdamState> states_;
};

} // namespace scr::nn
