#pragma once

#include "scr/core/rng.hpp"
#include "scr/data/sampling.hpp"
#include "scr/textenc/text_encoder.hpp"

#include <optional>
#include <vector>

namespace scr::textenc {

/// One sigmoid-linear classifier per style, stored as a single D → S layer.
struct LrBaseline {
    nn::DenseLayer layer;
    std::vector<std::string> style_names;

    std::vector<nn::ParamRef> parameters();
};

/// Zero-initialised baseline.
LrBaseline make_lr_baseline(std::size_t input_dim, std::vector<std::string> style_names);

nn::Tensor2 lr_predict(const LrBaseline& model, const nn::Tensor2& content);

/// Mean per-sample BCE; gradients accumulated into `grads` when non-null.
double lr_loss(const LrBaseline& model, const nn::Tensor2& content, const nn::Tensor2& targets,
               nn::DenseGrads* grads);

LossCurve train_lr_baseline(LrBaseline& model, const data::LabeledProfileDataset& dataset,
                            const TextTrainConfig& config, Rng& rng);

struct AucReport {
    std::vector<std::string> style_names;
    std::vector<std::optional<double>> per_style;
    std::optional<double> average;
};

AucReport auc_report(const nn::Tensor2& scores, const data::LabeledProfileDataset& heldout);

} // namespace scr::textenc
