#pragma once

#include "scr/core/rng.hpp"
#include "scr/data/click_matrix.hpp"
#include "scr/data/item_table.hpp"
#include "scr/nn/adam.hpp"
#include "scr/nn/layer.hpp"
#include "scr/nn/loss.hpp"
#include "scr/textenc/text_encoder.hpp"

#include <span>
#include <string>
#include <vector>

namespace scr::vae {

/// styles == 0 is the unconditioned ablation.
struct ClickVaeShape {
    std::size_t items = 0;
    std::size_t styles = 0;
    std::size_t hidden = 100;
    std::size_t latent = 32;
    double decoder_dropout = 0.5;
};

/**
 * Encoder [x | z_T] → tanh → (μ, log σ²); decoder [z | z_T] → tanh → softmax
 * over items. x is the binarised, L2-normalised click row.
 */
struct ClickVaeModel {
    ClickVaeShape shape;
    std::vector<std::string> style_names;
    nn::DenseLayer enc_hidden;
    nn::DenseLayer enc_head;
    nn::DenseLayer dec_hidden;
    nn::DenseLayer dec_head;

    ClickVaeModel() = default;
    /// Zero weights.
    ClickVaeModel(ClickVaeShape shape, std::vector<std::string> style_names);
    static ClickVaeModel initialized(ClickVaeShape shape, std::vector<std::string> style_names, Rng& rng);

    std::size_t items() const noexcept { return shape.items; }
    std::size_t styles() const noexcept { return shape.styles; }
    std::size_t latent() const noexcept { return shape.latent; }
    bool conditioned() const noexcept { return shape.styles > 0; }

    std::vector<nn::ParamRef> parameters();
};

/// Binary click rows over `items` columns, each scaled to unit L2 norm (empty rows stay zero).
nn::Tensor2 normalized_clicks(std::span<const std::vector<std::size_t>> rows, std::size_t items);
/// Binary (unnormalised) click rows.
nn::Tensor2 binary_clicks(std::span<const std::vector<std::size_t>> rows, std::size_t items);

/// q(z | x, z_T). `profiles` has `styles` columns (zero columns when unconditioned).
nn::GaussianParams encode_clicks(const ClickVaeModel& model, const nn::Tensor2& normalized,
                                 const nn::Tensor2& profiles);

/// z = μ + exp(0.5·log σ²) ∘ ε.
nn::Tensor2 reparameterize(const nn::GaussianParams& params, const nn::Tensor2& epsilon);

/// Inference-mode item distribution for each row of `z`.
nn::Tensor2 decode_clicks(const ClickVaeModel& model, const nn::Tensor2& z, const nn::Tensor2& profiles);

/// multinomial_nll(targets, probs) + β·gaussian_kl(params).
double cvae_loss(const nn::Tensor2& targets, const nn::Tensor2& probs, const nn::GaussianParams& params,
                 double beta);

struct ClickVaeGrads {
    nn::DenseGrads enc_hidden;
    nn::DenseGrads enc_head;
    nn::DenseGrads dec_hidden;
    nn::DenseGrads dec_head;

    explicit ClickVaeGrads(const ClickVaeModel& model);
    void zero();
    std::vector<std::span<const double>> spans() const;
};

struct BatchLoss {
    double loss = 0.0;           ///< per-user mean of cvae_loss
    double reconstruction = 0.0; ///< per-user mean multinomial NLL
    double kl = 0.0;             ///< per-user mean KL
    double min_row_kl = 0.0;
    double max_row_sum_error = 0.0;
};

/**
 * One minibatch of the training objective. `epsilon` (batch × L) and
 * `decoder_mask` (batch × L, applied to z only) may be null for ε = 0 and no
 * dropout. Gradients accumulate into `grads` when non-null.
 */
BatchLoss cvae_batch_loss(const ClickVaeModel& model, const nn::Tensor2& targets, const nn::Tensor2& profiles,
                          const nn::Tensor2* epsilon, const nn::Tensor2* decoder_mask, double beta,
                          ClickVaeGrads* grads);

struct VaeTrainConfig {
    double beta = 0.17;
    std::size_t k = 5;
    std::size_t epochs = 60;
    std::size_t batch_size = 100;
    nn::AdamConfig adam;
    /// Linear β ramp over the first 20% of steps.
    bool beta_warmup = false;
};

struct VaeTrainReport {
    textenc::LossCurve curve;
    std::size_t steps = 0;
    double min_kl = 0.0;              ///< smallest per-user KL seen at any step
    double max_row_sum_error = 0.0;   ///< largest |Σ probs − 1| seen at any step
    std::uint64_t text_hash_before = 0;
    std::uint64_t text_hash_after = 0;
};

/// FNV-1a of the text encoder's parameter bytes.
std::uint64_t text_encoder_hash(const textenc::TextEncoderModel& model);

/**
 * Minibatch Adam on the β-weighted objective. Each epoch redraws every user's
 * content vector from k clicked items and re-encodes it with the frozen text
 * encoder (`text` may be null only for an unconditioned model). Invariant
 * violations and non-finite losses restore the last finite epoch's parameters
 * and throw NumericError.
 */
VaeTrainReport train_click_vae(ClickVaeModel& model, const data::ClickMatrix& clicks,
                               const textenc::TextEncoderModel* text, const data::ItemEmbeddingTable& embeddings,
                               const VaeTrainConfig& config, Rng& rng);

} // namespace scr::vae
