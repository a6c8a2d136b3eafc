#include "scr/textenc/text_encoder.hpp"

#include "scr/core/errors.hpp"
#include "scr/core/log.hpp"
#include "scr/nn/dropout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scr::textenc {

using nn::Activation;
using nn::DenseLayer;
using nn::Tensor2;

std::string_view to_string(EncoderVariant v)
{
    return v == EncoderVariant::plain ? "plain" : "gaussian_prior";
}

EncoderVariant variant_from_string(std::string_view name)
{
    if (name == "plain")
        return EncoderVariant::plain;
    if (name == "gaussian_prior" || name == "gaussian-prior")
        return EncoderVariant::gaussian_prior;
    throw ConfigError("unknown text encoder variant '" + std::string(name) + "'");
}

namespace {

std::size_t head_width(const TextEncoderShape& s)
{
    return s.variant == EncoderVariant::plain ? s.styles : 2 * s.styles;
}

Activation head_activation(const TextEncoderShape& s)
{
    return s.variant == EncoderVariant::plain ? Activation::sigmoid : Activation::identity;
}

void validate(const TextEncoderShape& s, std::size_t names)
{
    if (s.input_dim == 0 || s.hidden1 == 0 || s.hidden2 == 0 || s.styles == 0)
        throw ConfigError("text encoder dimensions must be positive");
    if (names != s.styles)
        throw ConfigError("text encoder: " + std::to_string(names) + " style names for " +
                          std::to_string(s.styles) + " styles");
    if (!(s.input_dropout >= 0.0 && s.input_dropout < 1.0))
        throw ConfigError("text encoder input dropout must be in [0, 1)");
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Pass {
    Tensor2 input;
    Tensor2 h1;
    Tensor2 h2;
    Tensor2 head;
    nn::GaussianParams gaussian;
    Tensor2 probs;
};

Pass run(const TextEncoderModel& m, const Tensor2& content, const Tensor2* mask, const Tensor2* noise)
{
    if (content.cols() != m.input_dim())
        throw ShapeError("text encoder expects " + std::to_string(m.input_dim()) + " input features, got " +
                         std::to_string(content.cols()));
    Pass p;
    p.input = content;
    if (mask)
        nn::apply_mask(p.input, *mask);
    p.h1 = nn::forward(m.layer1, p.input);
    p.h2 = nn::forward(m.layer2, p.h1);
    p.head = nn::forward(m.head, p.h2);
    if (m.shape.variant == EncoderVariant::plain) {
        p.probs = p.head;
        return p;
    }
    const std::size_t s = m.styles();
    p.gaussian = {nn::column_slice(p.head, 0, s), nn::column_slice(p.head, s, s)};
    if (noise && (noise->rows() != content.rows() || noise->cols() != s))
        throw ShapeError("text encoder noise must be batch × styles");
    p.probs = Tensor2(content.rows(), s);
    for (std::size_t r = 0; r < content.rows(); ++r)
        for (std::size_t c = 0; c < s; ++c) {
            double z = p.gaussian.mu(r, c);
            if (noise)
                z += std::exp(0.5 * p.gaussian.log_var(r, c)) * (*noise)(r, c);
            p.probs(r, c) = sigmoid(z);
        }
    return p;
}

} // namespace

TextEncoderModel::TextEncoderModel(TextEncoderShape s, std::vector<std::string> names)
    : shape(s), style_names(std::move(names))
{
    validate(shape, style_names.size());
    layer1 = DenseLayer(shape.input_dim, shape.hidden1, Activation::relu);
    layer2 = DenseLayer(shape.hidden1, shape.hidden2, Activation::relu);
    head = DenseLayer(shape.hidden2, head_width(shape), head_activation(shape));
}

TextEncoderModel TextEncoderModel::initialized(TextEncoderShape s, std::vector<std::string> names, Rng& rng)
{
    TextEncoderModel m(s, std::move(names));
    m.layer1 = DenseLayer::glorot(s.input_dim, s.hidden1, Activation::relu, rng);
    m.layer2 = DenseLayer::glorot(s.hidden1, s.hidden2, Activation::relu, rng);
    m.head = DenseLayer::glorot(s.hidden2, head_width(s), head_activation(s), rng);
    return m;
}

std::vector<nn::ParamRef> TextEncoderModel::parameters()
{
    std::vector<nn::ParamRef> out;
    nn::append_params(out, "text.layer1", layer1);
    nn::append_params(out, "text.layer2", layer2);
    nn::append_params(out, "text.head", head);
    return out;
}

UserStyleProfile encode(const TextEncoderModel& model, std::span<const double> content)
{
    Tensor2 x(1, content.size(), std::vector<double>(content.begin(), content.end()));
    Tensor2 p = encode_batch(model, x);
    return {std::vector<double>(p.row(0).begin(), p.row(0).end()), model.style_names};
}

Tensor2 encode_batch(const TextEncoderModel& model, const Tensor2& content)
{
    return run(model, content, nullptr, nullptr).probs;
}

TextEncoderGrads::TextEncoderGrads(const TextEncoderModel& m) : layer1(m.layer1), layer2(m.layer2), head(m.head) {}

void TextEncoderGrads::zero()
{
    layer1.zero();
    layer2.zero();
    head.zero();
}

std::vector<std::span<const double>> TextEncoderGrads::spans() const
{
    std::vector<std::span<const double>> out;
    nn::append_grads(out, layer1);
    nn::append_grads(out, layer2);
    nn::append_grads(out, head);
    return out;
}

double text_encoder_loss(const TextEncoderModel& model, const Tensor2& content, const Tensor2& targets,
                         const Tensor2* input_mask, const Tensor2* noise, TextEncoderGrads* grads)
{
    if (content.rows() == 0)
        throw ShapeError("text_encoder_loss: empty batch");
    const Pass p = run(model, content, input_mask, noise);
    const double n = static_cast<double>(content.rows());
    const bool gaussian = model.shape.variant == EncoderVariant::gaussian_prior;

    double loss = nn::multilabel_bce(targets, p.probs);
    if (gaussian)
        loss += nn::gaussian_kl(p.gaussian);
    loss /= n;
    if (!grads)
        return loss;

    Tensor2 dprobs = nn::multilabel_bce_grad(targets, p.probs);
    for (double& v : dprobs.values())
        v /= n;

    Tensor2 dhead;
    if (!gaussian) {
        dhead = std::move(dprobs);
    } else {
        const std::size_t s = model.styles();
        const nn::GaussianParams kl = nn::gaussian_kl_grad(p.gaussian);
        dhead = Tensor2(content.rows(), 2 * s);
        for (std::size_t r = 0; r < content.rows(); ++r)
            for (std::size_t c = 0; c < s; ++c) {
                const double pr = p.probs(r, c);
                const double dz = dprobs(r, c) * pr * (1.0 - pr);
                const double eps = noise ? (*noise)(r, c) : 0.0;
                const double sd = std::exp(0.5 * p.gaussian.log_var(r, c));
                dhead(r, c) = dz + kl.mu(r, c) / n;
                dhead(r, s + c) = dz * eps * 0.5 * sd + kl.log_var(r, c) / n;
            }
    }
    Tensor2 dh2 = nn::backward(model.head, p.h2, p.head, dhead, grads->head);
    Tensor2 dh1 = nn::backward(model.layer2, p.h1, p.h2, dh2, grads->layer2);
    nn::backward(model.layer1, p.input, p.h1, dh1, grads->layer1, false);
    return loss;
}

double LossCurve::head_mean() const
{
    const std::size_t n = std::max<std::size_t>(1, (epoch_loss.size() + 9) / 10);
    return std::accumulate(epoch_loss.begin(), epoch_loss.begin() + static_cast<std::ptrdiff_t>(n), 0.0) /
           static_cast<double>(n);
}

double LossCurve::tail_mean() const
{
    const std::size_t n = std::max<std::size_t>(1, (epoch_loss.size() + 9) / 10);
    return std::accumulate(epoch_loss.end() - static_cast<std::ptrdiff_t>(n), epoch_loss.end(), 0.0) /
           static_cast<double>(n);
}

LossCurve train_text_encoder(TextEncoderModel& model, const data::LabeledProfileDataset& dataset,
                             const TextTrainConfig& config, Rng& rng)
{
    if (dataset.size() == 0)
        throw DataError("text encoder training set is empty");
    if (dataset.vectors.cols() != model.input_dim() || dataset.profiles.cols() != model.styles())
        throw ShapeError("text encoder training set does not match the model dimensions");
    if (config.batch_size == 0)
        throw ConfigError("batch size must be positive");

    auto params = model.parameters();
    nn::AdamOptimizer adam(config.adam);
    TextEncoderGrads grads(model);
    std::vector<double> last_good = nn::flatten(params);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    std::normal_distribution<double> normal;
    const bool gaussian = model.shape.variant == EncoderVariant::gaussian_prior;

    LossCurve curve;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const std::span<const std::size_t> rows(order.data() + start, end - start);
            const data::LabeledProfileDataset batch = dataset.subset(rows);

            Tensor2 mask = nn::dropout_mask(batch.size(), model.input_dim(), model.shape.input_dropout, rng);
            Tensor2 noise;
            if (gaussian) {
                noise = Tensor2(batch.size(), model.styles());
                for (double& v : noise.values())
                    v = normal(rng);
            }
            grads.zero();
            const double loss = text_encoder_loss(model, batch.vectors, batch.profiles, &mask,
                                                  gaussian ? &noise : nullptr, &grads);
            if (!std::isfinite(loss)) {
                nn::unflatten(last_good, params);
                throw NumericError("text encoder loss became non-finite in epoch " + std::to_string(epoch + 1) +
                                   "; parameters restored to the last finite epoch");
            }
            try {
                adam.step(params, grads.spans());
            } catch (const NumericError&) {
                nn::unflatten(last_good, params);
                throw;
            }
            total += loss;
            ++batches;
        }
        curve.epoch_loss.push_back(total / static_cast<double>(batches));
        last_good = nn::flatten(params);
    }
    log::info("text encoder: " + std::to_string(config.epochs) + " epochs, final loss " +
              std::to_string(curve.epoch_loss.empty() ? 0.0 : curve.epoch_loss.back()));
    return curve;
}

} // namespace scr::textenc
