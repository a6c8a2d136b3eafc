#pragma once

#include "scr/data/item_table.hpp"
#include "scr/nn/tensor.hpp"
#include "scr/textenc/text_encoder.hpp"
#include "scr/vae/click_vae.hpp"
#include "scr/vae/recommend.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace scr::inject {

struct InjectionRequest {
    std::vector<double> target_profile;
    std::size_t top_n = 20;
};

/// Length-`styles` vector with a single 1 at `style`.
std::vector<double> one_hot(std::size_t styles, std::size_t style);

/**
 * Ranking with the encoder conditioned on the user's learned profile and the
 * decoder conditioned on `request.target_profile`. Fold-in items are excluded.
 */
std::vector<std::size_t> inject_style(const vae::ClickVaeModel& model, const textenc::TextEncoderModel& text,
                                      std::span<const std::size_t> fold_in, const data::ItemEmbeddingTable& embeddings,
                                      const InjectionRequest& request, const vae::ProfileSpec& spec = {});

struct ShiftConfig {
    std::size_t top_n = 20;
    std::size_t sample = 5;
    std::size_t resamples = 3;
    vae::ProfileSpec profile;
};

struct InjectionShift {
    std::vector<std::string> style_names;
    std::size_t users = 0;
    /// Row = injected style, column = mean change of the re-encoded profile.
    nn::Tensor2 shift;
    /// Mean re-encoded s-coordinate when injecting s, and under identity injection.
    std::vector<double> injected_presence;
    std::vector<double> identity_presence;
    /// Mean top-n overlap with identity injection, per injected style.
    std::vector<double> rank_overlap;

    /// (injected − identity) / identity for style s.
    double relative_increase(std::size_t s) const;
    double mean_relative_increase() const;
    bool diagonal_positive() const;
    bool diagonal_row_maximal() const;
};

/**
 * For every user and style s: inject one_hot(s), take the top-n list, draw
 * `sample` of its items `resamples` times, re-encode each draw's mean
 * embedding and average; the shift is this measured profile minus the user's
 * learned profile. Each user draws from its own stream derived from `seed`.
 */
InjectionShift measure_injection_shift(const vae::ClickVaeModel& model, const textenc::TextEncoderModel& text,
                                       std::span<const std::vector<std::size_t>> fold_ins,
                                       const data::ItemEmbeddingTable& embeddings, const ShiftConfig& config,
                                       std::uint64_t seed);

} // namespace scr::inject
