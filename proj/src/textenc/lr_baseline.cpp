#include "scr/textenc/lr_baseline.hpp"

#include "scr/core/errors.hpp"
#include "scr/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scr::textenc {

using nn::Tensor2;

std::vector<nn::ParamRef> LrBaseline::parameters()
{
    std::vector<nn::ParamRef> out;
    nn::append_params(out, "lr", layer);
    return out;
}

LrBaseline make_lr_baseline(std::size_t input_dim, std::vector<std::string> style_names)
{
    if (input_dim == 0 || style_names.empty())
        throw ConfigError("logistic baseline needs positive input and style dimensions");
    LrBaseline m;
    m.layer = nn::DenseLayer(input_dim, style_names.size(), nn::Activation::sigmoid);
    m.style_names = std::move(style_names);
    return m;
}

Tensor2 lr_predict(const LrBaseline& model, const Tensor2& content) { return nn::forward(model.layer, content); }

double lr_loss(const LrBaseline& model, const Tensor2& content, const Tensor2& targets, nn::DenseGrads* grads)
{
    if (content.rows() == 0)
        throw ShapeError("lr_loss: empty batch");
    const Tensor2 probs = lr_predict(model, content);
    const double n = static_cast<double>(content.rows());
    const double loss = nn::multilabel_bce(targets, probs) / n;
    if (grads) {
        Tensor2 d = nn::multilabel_bce_grad(targets, probs);
        for (double& v : d.values())
            v /= n;
        nn::backward(model.layer, content, probs, d, *grads, false);
    }
    return loss;
}

LossCurve train_lr_baseline(LrBaseline& model, const data::LabeledProfileDataset& dataset,
                            const TextTrainConfig& config, Rng& rng)
{
    if (dataset.size() == 0)
        throw DataError("logistic baseline training set is empty");
    if (config.batch_size == 0)
        throw ConfigError("batch size must be positive");
    auto params = model.parameters();
    nn::AdamOptimizer adam(config.adam);
    nn::DenseGrads grads(model.layer);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    LossCurve curve;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const auto batch = dataset.subset(std::span<const std::size_t>(order.data() + start, end - start));
            grads.zero();
            const double loss = lr_loss(model, batch.vectors, batch.profiles, &grads);
            if (!std::isfinite(loss))
                throw NumericError("logistic baseline loss became non-finite in epoch " + std::to_string(epoch + 1));
            std::vector<std::span<const double>> g;
            nn::append_grads(g, grads);
            adam.step(params, g);
            total += loss;
            ++batches;
        }
        curve.epoch_loss.push_back(total / static_cast<double>(batches));
    }
    return curve;
}

AucReport auc_report(const Tensor2& scores, const data::LabeledProfileDataset& heldout)
{
    AucReport r;
    r.style_names = heldout.style_names;
    r.per_style = eval::per_style_auc(scores, heldout.profiles);
    r.average = eval::mean_defined(r.per_style);
    return r;
}

} // namespace scr::textenc
