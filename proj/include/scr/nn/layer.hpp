#pragma once

#include "scr/core/rng.hpp"
#include "scr/nn/tensor.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scr::nn {

enum class Activation { identity, tanh, relu, sigmoid, softmax };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

/// In-place activation over each row of `t`. Softmax is row-wise and max-shifted.
void apply_activation(Tensor2& t, Activation a);

/// Given the activation's output and dL/d(output), returns dL/d(pre-activation).
Tensor2 activation_backward(const Tensor2& output, const Tensor2& grad_output, Activation a);

/// Fully connected layer: output = activation(input · weights + bias), weights in×out.
struct DenseLayer {
    Tensor2 weights;
    std::vector<double> bias;
    Activation activation = Activation::identity;

    DenseLayer() = default;
    /// Zero-initialised layer.
    DenseLayer(std::size_t in, std::size_t out, Activation act);

    /// Glorot-uniform weights, zero bias.
    static DenseLayer glorot(std::size_t in, std::size_t out, Activation act, Rng& rng);

    std::size_t in() const noexcept { return weights.rows(); }
    std::size_t out() const noexcept { return weights.cols(); }

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct DenseGrads {
    Tensor2 weights;
    std::vector<double> bias;

    DenseGrads() = default;
    explicit DenseGrads(const DenseLayer& layer);
    void zero();
};

Tensor2 forward(const DenseLayer& layer, const Tensor2& input);

/// Pre-activation only (input · weights + bias).
Tensor2 affine(const DenseLayer& layer, const Tensor2& input);

/**
 * Backpropagates dL/d(output) through the activation and the affine map.
 * Parameter gradients are accumulated into `grads`; the return value is
 * dL/d(input), or an empty tensor when `want_input_grad` is false.
 */
Tensor2 backward(const DenseLayer& layer, const Tensor2& input, const Tensor2& output,
                 const Tensor2& grad_output, DenseGrads& grads, bool want_input_grad = true);

/// Named mutable view of one parameter tensor, used by optimizers and checkpoints.
struct ParamRef {
    std::string name;
    std::size_t rows;
    std::size_t cols;
    std::span<double> values;
};

/// Appends `prefix.weights` and `prefix.bias` views of `layer`.
void append_params(std::vector<ParamRef>& out, std::string_view prefix, DenseLayer& layer);
void append_grads(std::vector<std::span<const double>>& out, const DenseGrads& grads);

/// Flattened copy of all parameter values, in order.
std::vector<double> flatten(const std::vector<ParamRef>& params);
void unflatten(std::span<const double> flat, const std::vector<ParamRef>& params);

/// FNV-1a over the raw bytes of every parameter. Changes iff any bit changes.
std::uint64_t parameter_hash(const std::vector<ParamRef>& params);

} // namespace scr::nn
