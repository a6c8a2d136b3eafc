#include "scr/nn/adam.hpp"

#include "scr/core/errors.hpp"

#include <cmath>
#include <string>

namespace scr::nn {

AdamState::AdamState(std::size_t size, AdamConfig cfg)
    : first_moment(size, 0.0), second_moment(size, 0.0), config(cfg)
{
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads)
{
    if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
        params.size() != state.second_moment.size())
        throw ShapeError("adam_step: parameter, gradient and moment sizes differ");
    for (std::size_t i = 0; i < grads.size(); ++i)
        if (!std::isfinite(grads[i]))
            throw NumericError("adam_step: non-finite gradient at index " + std::to_string(i) + " (step " +
                               std::to_string(state.step + 1) + ")");

    ++state.step;
    const auto& c = state.config;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = c.beta1 * m + (1.0 - c.beta1) * g;
        v = c.beta2 * v + (1.0 - c.beta2) * g * g;
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        params[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
}

AdamOptimizer::AdamOptimizer(AdamConfig config) : config_(config) {}

void AdamOptimizer::step(const std::vector<ParamRef>& params, const std::vector<std::span<const double>>& grads)
{
    if (params.size() != grads.size())
        throw ShapeError("AdamOptimizer: " + std::to_string(params.size()) + " parameter blocks but " +
                         std::to_string(grads.size()) + " gradient blocks");
    if (states_.empty()) {
        states_.reserve(params.size());
        for (const auto& p : params)
            states_.emplace_back(p.values.size(), config_);
    }
    if (states_.size() != params.size())
        throw ShapeError("AdamOptimizer: parameter block count changed between steps");
    for (std::size_t b = 0; b < params.size(); ++b)
        adam_step(states_[b], params[b].values, grads[b]);
}

} // namespace scr::nn
