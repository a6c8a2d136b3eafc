#include "scr/nn/layer.hpp"

#include "scr/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace scr::nn {

std::string_view to_string(Activation a)
{
    switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::softmax: return "softmax";
    }
    return "identity";
}

Activation activation_from_string(std::string_view name)
{
    for (auto a : {Activation::identity, Activation::tanh, Activation::relu, Activation::sigmoid,
                   Activation::softmax})
        if (to_string(a) == name)
            return a;
    throw ConfigError("unknown activation '" + std::string(name) + "'");
}

void apply_activation(Tensor2& t, Activation a)
{
    auto v = t.values();
    switch (a) {
    case Activation::identity:
        break;
    case Activation::tanh:
        for (double& x : v)
            x = std::tanh(x);
        break;
    case Activation::relu:
        for (double& x : v)
            x = x > 0.0 ? x : 0.0;
        break;
    case Activation::sigmoid:
        for (double& x : v)
            x = 1.0 / (1.0 + std::exp(-x));
        break;
    case Activation::softmax:
        for (std::size_t r = 0; r < t.rows(); ++r) {
            auto row = t.row(r);
            if (row.empty())
                continue;
            const double m = *std::max_element(row.begin(), row.end());
            double sum = 0.0;
            for (double& x : row) {
                x = std::exp(x - m);
                sum += x;
            }
            for (double& x : row)
                x /= sum;
        }
        break;
    }
}

Tensor2 activation_backward(const Tensor2& output, const Tensor2& grad_output, Activation a)
{
    if (output.rows() != grad_output.rows() || output.cols() != grad_output.cols())
        throw ShapeError("activation gradient shape mismatch");
    Tensor2 g = grad_output;
    auto gv = g.values();
    auto y = output.values();
    switch (a) {
    case Activation::identity:
        break;
    case Activation::tanh:
        for (std::size_t i = 0; i < gv.size(); ++i)
            gv[i] *= 1.0 - y[i] * y[i];
        break;
    case Activation::relu:
        for (std::size_t i = 0; i < gv.size(); ++i)
            if (y[i] <= 0.0)
                gv[i] = 0.0;
        break;
    case Activation::sigmoid:
        for (std::size_t i = 0; i < gv.size(); ++i)
            gv[i] *= y[i] * (1.0 - y[i]);
        break;
    case Activation::softmax:
        // Jacobian-vector product: y ∘ (g − ⟨g, y⟩) per row.
        for (std::size_t r = 0; r < g.rows(); ++r) {
            auto gr = g.row(r);
            auto yr = output.row(r);
            double dot = 0.0;
            for (std::size_t j = 0; j < gr.size(); ++j)
                dot += gr[j] * yr[j];
            for (std::size_t j = 0; j < gr.size(); ++j)
                gr[j] = yr[j] * (gr[j] - dot);
        }
        break;
    }
    return g;
}

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Activation act)
    : weights(in, out), bias(out, 0.0), activation(act)
{
}

DenseLayer DenseLayer::glorot(std::size_t in, std::size_t out, Activation act, Rng& rng)
{
    DenseLayer layer(in, out, act);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : layer.weights.values())
        w = dist(rng);
    return layer;
}

DenseGrads::DenseGrads(const DenseLayer& layer)
    : weights(layer.weights.rows(), layer.weights.cols()), bias(layer.bias.size(), 0.0)
{
}

void DenseGrads::zero()
{
    weights.fill(0.0);
    std::fill(bias.begin(), bias.end(), 0.0);
}

Tensor2 affine(const DenseLayer& layer, const Tensor2& input)
{
    if (input.cols() != layer.in())
        throw ShapeError("dense layer expects " + std::to_string(layer.in()) + " input columns, got " +
                         std::to_string(input.cols()));
    Tensor2 out = matmul(input, layer.weights);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] += layer.bias[j];
    }
    return out;
}

Tensor2 forward(const DenseLayer& layer, const Tensor2& input)
{
    Tensor2 out = affine(layer, input);
    apply_activation(out, layer.activation);
    return out;
}

Tensor2 backward(const DenseLayer& layer, const Tensor2& input, const Tensor2& output,
                 const Tensor2& grad_output, DenseGrads& grads, bool want_input_grad)
{
    Tensor2 g_pre = activation_backward(output, grad_output, layer.activation);
    matmul_at_b_accumulate(input, g_pre, grads.weights);
    for (std::size_t r = 0; r < g_pre.rows(); ++r) {
        auto row = g_pre.row(r);
        for (std::size_t j = 0; j < row.size(); ++j)
            grads.bias[j] += row[j];
    }
    if (!want_input_grad)
        return {};
    return matmul_a_bt(g_pre, layer.weights);
}

void append_params(std::vector<ParamRef>& out, std::string_view prefix, DenseLayer& layer)
{
    std::string p(prefix);
    out.push_back({p + ".weights", layer.weights.rows(), layer.weights.cols(), layer.weights.values()});
    out.push_back({p + ".bias", 1, layer.bias.size(), layer.bias});
}

void append_grads(std::vector<std::span<const double>>& out, const DenseGrads& grads)
{
    out.push_back(grads.weights.values());
    out.push_back(grads.bias);
}

std::vector<double> flatten(const std::vector<ParamRef>& params)
{
    std::vector<double> flat;
    for (const auto& p : params)
        flat.insert(flat.end(), p.values.begin(), p.values.end());
    return flat;
}

void unflatten(std::span<const double> flat, const std::vector<ParamRef>& params)
{
    std::size_t offset = 0;
    for (const auto& p : params) {
        if (offset + p.values.size() > flat.size())
            throw ShapeError("flat parameter vector too short");
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), p.values.size(), p.values.begin());
        offset += p.values.size();
    }
    if (offset != flat.size())
        throw ShapeError("flat parameter vector too long");
}

std::uint64_t parameter_hash(const std::vector<ParamRef>& params)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& p : params) {
        const auto* bytes = reinterpret_cast<const unsigned char*>(p.values.data());
        for (std::size_t i = 0; i < p.values.size_bytes(); ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

} // namespace scr::nn
