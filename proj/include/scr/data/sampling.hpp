#pragma once

#include "scr/core/rng.hpp"
#include "scr/data/click_matrix.hpp"
#include "scr/data/item_table.hpp"
#include "scr/nn/tensor.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace scr::data {

/// k draws from `pool`: uniformly without replacement when the pool holds at least k items,
/// otherwise uniformly with replacement.
std::vector<std::size_t> sample_items(std::span<const std::size_t> pool, std::size_t k, Rng& rng);

/// Arithmetic mean of the embedding rows of `items` (repeats count).
std::vector<double> mean_embedding(std::span<const std::size_t> items, const ItemEmbeddingTable& embeddings);

/// Content vector of one user: the mean embedding of k sampled clicked items.
std::vector<double> user_content_vector(std::span<const std::size_t> clicked, const ItemEmbeddingTable& embeddings,
                                        std::size_t k, Rng& rng, std::string_view user_id = {});

/// Content vector from the k most recent items (or all, if fewer).
std::vector<double> recent_content_vector(std::span<const std::size_t> clicked, const ItemEmbeddingTable& embeddings,
                                          std::size_t k, std::string_view user_id = {});

enum class ThresholdRule { at_least, strictly_greater };

/// Binarises per-style label masses against θ = 1/k.
std::vector<double> threshold_profile(std::span<const double> masses, std::size_t k, ThresholdRule rule);

/// Content vectors paired with binary style targets.
struct LabeledProfileDataset {
    nn::Tensor2 vectors;
    nn::Tensor2 profiles;
    std::vector<std::string> style_names;
    // Audit trail: the user row and sampled catalog items behind each sample (may be empty).
    std::vector<std::size_t> source_users;
    std::vector<std::vector<std::size_t>> sampled_items;

    std::size_t size() const noexcept { return vectors.rows(); }
    /// Samples at the given positions, in order.
    LabeledProfileDataset subset(std::span<const std::size_t> rows) const;
};

struct LabelPropConfig {
    std::size_t k = 5;
    std::size_t repeats = 10;
    ThresholdRule rule = ThresholdRule::at_least;
};

/**
 * Builds text-encoder training pairs by label propagation. For every repeat and
 * every user with at least one labeled click, k labeled clicks are sampled; the
 * sample's input is their mean embedding and its target is the thresholded mean
 * of their label rows. `embeddings` must be aligned to the click catalog.
 */
LabeledProfileDataset build_labelprop_dataset(const ClickMatrix& clicks, const StyleLabelMatrix& labels,
                                              const ItemEmbeddingTable& embeddings, const LabelPropConfig& config,
                                              Rng& rng);

} // namespace scr::data
