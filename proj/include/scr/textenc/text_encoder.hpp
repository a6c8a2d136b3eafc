#pragma once

#include "scr/core/rng.hpp"
#include "scr/data/sampling.hpp"
#include "scr/nn/adam.hpp"
#include "scr/nn/layer.hpp"
#include "scr/nn/loss.hpp"

#include <span>
#include <string>
#include <vector>

namespace scr::textenc {

enum class EncoderVariant { plain, gaussian_prior };

std::string_view to_string(EncoderVariant v);
EncoderVariant variant_from_string(std::string_view name);

struct TextEncoderShape {
    std::size_t input_dim = 0;
    std::size_t hidden1 = 128;
    std::size_t hidden2 = 64;
    std::size_t styles = 0;
    double input_dropout = 0.1;
    EncoderVariant variant = EncoderVariant::plain;
};

/**
 * Content vector → style profile. Two ReLU layers and a sigmoid head.
 *
 * The gaussian_prior head emits (μ, log σ²) of length S; the profile is the
 * sigmoid of a reparameterised sample during training and of μ at inference.
 */
struct TextEncoderModel {
    TextEncoderShape shape;
    std::vector<std::string> style_names;
    nn::DenseLayer layer1;
    nn::DenseLayer layer2;
    nn::DenseLayer head;

    TextEncoderModel() = default;
    /// Zero weights.
    TextEncoderModel(TextEncoderShape shape, std::vector<std::string> style_names);
    static TextEncoderModel initialized(TextEncoderShape shape, std::vector<std::string> style_names, Rng& rng);

    std::size_t input_dim() const noexcept { return shape.input_dim; }
    std::size_t styles() const noexcept { return shape.styles; }

    std::vector<nn::ParamRef> parameters();
};

struct UserStyleProfile {
    std::vector<double> values;
    std::vector<std::string> style_names;
};

/// Inference-mode profile of one content vector.
UserStyleProfile encode(const TextEncoderModel& model, std::span<const double> content);

/// Inference-mode profiles, one row per content vector.
nn::Tensor2 encode_batch(const TextEncoderModel& model, const nn::Tensor2& content);

struct TextEncoderGrads {
    nn::DenseGrads layer1;
    nn::DenseGrads layer2;
    nn::DenseGrads head;

    explicit TextEncoderGrads(const TextEncoderModel& model);
    void zero();
    std::vector<std::span<const double>> spans() const;
};

/**
 * Mean per-sample training loss: multilabel BCE against `targets`, plus the
 * Gaussian KL for the gaussian_prior variant.
 *
 * `input_mask` (dropout) and `noise` (reparameterisation ε, S columns) are
 * supplied by the caller so the loss is a deterministic function of the
 * parameters. Either may be null (no dropout / ε = 0). Gradients are
 * accumulated into `grads` when it is non-null.
 */
double text_encoder_loss(const TextEncoderModel& model, const nn::Tensor2& content, const nn::Tensor2& targets,
                         const nn::Tensor2* input_mask, const nn::Tensor2* noise, TextEncoderGrads* grads);

struct TextTrainConfig {
    std::size_t epochs = 60;
    std::size_t batch_size = 64;
    nn::AdamConfig adam;
};

struct LossCurve {
    std::vector<double> epoch_loss;

    /// Mean over the first and last ceil(10%) of epochs.
    double head_mean() const;
    double tail_mean() const;
};

/**
 * Minibatch Adam on text_encoder_loss. On a non-finite loss the parameters
 * from the end of the last finite epoch are restored and NumericError thrown.
 */
LossCurve train_text_encoder(TextEncoderModel& model, const data::LabeledProfileDataset& dataset,
                             const TextTrainConfig& config, Rng& rng);

} // namespace scr::textenc
