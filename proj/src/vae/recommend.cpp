#include "scr/vae/recommend.hpp"

#include "scr/core/errors.hpp"
#include "scr/data/sampling.hpp"

#include <algorithm>
#include <numeric>

namespace scr::vae {

std::string_view to_string(ProfileMode m) { return m == ProfileMode::sample_k ? "sample-k" : "last-k"; }

ProfileMode profile_mode_from_string(std::string_view name)
{
    if (name == "sample-k" || name == "sample_k")
        return ProfileMode::sample_k;
    if (name == "last-k" || name == "last_k")
        return ProfileMode::last_k;
    throw ConfigError("unknown profile mode '" + std::string(name) + "' (expected sample-k or last-k)");
}

std::vector<double> learned_profile(const textenc::TextEncoderModel* text, std::span<const std::size_t> fold_in,
                                    const data::ItemEmbeddingTable& embeddings, const ProfileSpec& spec)
{
    if (!text)
        return {};
    std::vector<double> content;
    if (spec.mode == ProfileMode::last_k) {
        content = data::recent_content_vector(fold_in, embeddings, spec.k);
    } else {
        std::uint64_t key = spec.seed;
        for (std::size_t i : fold_in)
            key = mix64(key ^ static_cast<std::uint64_t>(i));
        Rng rng(key);
        content = data::user_content_vector(fold_in, embeddings, spec.k, rng);
    }
    return textenc::encode(*text, content).values;
}

std::vector<std::size_t> rank_items(std::span<const double> scores, std::span<const std::size_t> exclude,
                                    std::size_t top_n)
{
    std::vector<char> skip(scores.size(), 0);
    for (std::size_t i : exclude)
        if (i < skip.size())
            skip[i] = 1;
    std::vector<std::size_t> idx;
    idx.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (!skip[i])
            idx.push_back(i);
    const std::size_t n = std::min(top_n, idx.size());
    auto better = [&](std::size_t a, std::size_t b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(), better);
    idx.resize(n);
    return idx;
}

std::vector<double> score_items(const ClickVaeModel& model, std::span<const std::size_t> fold_in,
                                std::span<const double> encoder_profile, std::span<const double> decoder_profile)
{
    if (encoder_profile.size() != model.styles() || decoder_profile.size() != model.styles())
        throw ShapeError("profile length must equal the model's style count (" + std::to_string(model.styles()) + ")");
    const std::vector<std::vector<std::size_t>> rows{{fold_in.begin(), fold_in.end()}};
    const nn::Tensor2 x = normalized_clicks(rows, model.items());
    const nn::Tensor2 enc_cond(1, model.styles(), {encoder_profile.begin(), encoder_profile.end()});
    const nn::Tensor2 dec_cond(1, model.styles(), {decoder_profile.begin(), decoder_profile.end()});
    const nn::Tensor2 probs = decode_clicks(model, encode_clicks(model, x, enc_cond).mu, dec_cond);
    return {probs.row(0).begin(), probs.row(0).end()};
}

std::vector<std::size_t> recommend(const ClickVaeModel& model, const textenc::TextEncoderModel* text,
                                   std::span<const std::size_t> fold_in, const data::ItemEmbeddingTable& embeddings,
                                   std::size_t top_n, const ProfileSpec& spec)
{
    if (fold_in.empty())
        throw DataError("cannot recommend for a user without fold-in clicks");
    if (model.conditioned() && !text)
        throw ConfigError("a conditioned click VAE needs its text encoder to recommend");
    const std::vector<double> profile = model.conditioned() ? learned_profile(text, fold_in, embeddings, spec)
                                                            : std::vector<double>{};
    return rank_items(score_items(model, fold_in, profile, profile), fold_in, top_n);
}

} // namespace scr::vae
