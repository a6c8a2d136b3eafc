#pragma once

#include "scr/data/item_table.hpp"
#include "scr/textenc/text_encoder.hpp"
#include "scr/vae/click_vae.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scr::vae {

enum class ProfileMode { sample_k, last_k };

std::string_view to_string(ProfileMode m);
ProfileMode profile_mode_from_string(std::string_view name);

/// How a user's inference-time content vector is formed.
struct ProfileSpec {
    ProfileMode mode = ProfileMode::sample_k;
    std::size_t k = 5;
    /// sample_k draws from a stream seeded by this value and the fold-in items.
    std::uint64_t seed = 0;
};

/**
 * The user's learned style profile from their fold-in clicks. Empty when
 * `text` is null (unconditioned model). Identical fold-in lists give identical
 * profiles.
 */
std::vector<double> learned_profile(const textenc::TextEncoderModel* text, std::span<const std::size_t> fold_in,
                                    const data::ItemEmbeddingTable& embeddings, const ProfileSpec& spec);

/// Item indices by descending score, ties by ascending index, skipping `exclude`; at most `top_n`.
std::vector<std::size_t> rank_items(std::span<const double> scores, std::span<const std::size_t> exclude,
                                    std::size_t top_n);

/// ε = 0 item distribution with separate encoder and decoder conditions.
std::vector<double> score_items(const ClickVaeModel& model, std::span<const std::size_t> fold_in,
                                std::span<const double> encoder_profile, std::span<const double> decoder_profile);

/**
 * Top-n unseen items for a user. Throws DataError when `fold_in` is empty.
 * `text` must be non-null for a conditioned model.
 */
std::vector<std::size_t> recommend(const ClickVaeModel& model, const textenc::TextEncoderModel* text,
                                   std::span<const std::size_t> fold_in, const data::ItemEmbeddingTable& embeddings,
                                   std::size_t top_n, const ProfileSpec& spec);

} // namespace scr::vae
