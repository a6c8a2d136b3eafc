#pragma once

#include "scr/core/rng.hpp"
#include "scr/data/click_matrix.hpp"
#include "scr/data/item_table.hpp"
#include "scr/nn/tensor.hpp"

#include <vector>

namespace scr::data {

struct SynthConfig {
    std::size_t users = 2000;
    std::size_t items = 500;
    std::size_t styles = 8;
    std::size_t dim = 32;
    double density = 0.05;           ///< mean clicks per user / items
    double noise = 0.1;              ///< per-coordinate embedding noise stddev
    double multi_style_rate = 0.137; ///< share of items with 2-3 styles
    double label_fraction = 0.2;     ///< share of items carrying labels
    double second_style_rate = 0.3;  ///< share of users with two dominant styles
    double background = 0.003;       ///< preference weight of non-dominant styles
    double secondary_weight = 0.25;  ///< click affinity contributed by an item's non-primary styles
    double popularity_sigma = 0.5;   ///< log-normal spread of item popularity
};

/// Planted-style dataset with its ground truth.
struct SynthDataset {
    ClickMatrix clicks;
    ItemEmbeddingTable embeddings;
    StyleLabelMatrix labels;
    nn::Tensor2 preferences;                           ///< users × styles, rows sum to 1
    nn::Tensor2 item_styles;                           ///< items × styles, binary
    std::vector<std::size_t> primary_style;            ///< per item
    std::vector<std::vector<std::size_t>> dominant;    ///< per user, 1 or 2 styles
    nn::Tensor2 centroids;                             ///< styles × dim
};

/**
 * Draws style centroids (orthonormal when styles <= dim), items with one to
 * three styles whose embedding is the mean of their centroids plus Gaussian
 * noise, users with one or two dominant styles, and clicks sampled without
 * replacement proportionally to popularity × style affinity.
 */
SynthDataset synth_generate(const SynthConfig& config, Rng& rng);

/// Share of clicks whose item's primary style is one of the clicking user's dominant styles.
double synth_style_agreement(const SynthDataset& ds);

} // namespace scr::data
