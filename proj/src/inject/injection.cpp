#include "scr/inject/injection.hpp"

#include "scr/core/errors.hpp"
#include "scr/core/log.hpp"
#include "scr/core/rng.hpp"
#include "scr/data/sampling.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

namespace scr::inject {

std::vector<double> one_hot(std::size_t styles, std::size_t style)
{
    if (style >= styles)
        throw ConfigError("style index " + std::to_string(style) + " outside " + std::to_string(styles) + " styles");
    std::vector<double> v(styles, 0.0);
    v[style] = 1.0;
    return v;
}

std::vector<std::size_t> inject_style(const vae::ClickVaeModel& model, const textenc::TextEncoderModel& text,
                                      std::span<const std::size_t> fold_in, const data::ItemEmbeddingTable& embeddings,
                                      const InjectionRequest& request, const vae::ProfileSpec& spec)
{
    if (!model.conditioned())
        throw ConfigError("style injection needs a conditioned model");
    if (fold_in.empty())
        throw DataError("cannot inject for a user without fold-in clicks");
    if (request.top_n < 1)
        throw ConfigError("top-n must be at least 1");
    for (double v : request.target_profile)
        if (!(v >= 0.0 && v <= 1.0))
            throw DomainError("target profile values must lie in [0, 1]");
    const auto learned = vae::learned_profile(&text, fold_in, embeddings, spec);
    const auto scores = vae::score_items(model, fold_in, learned, request.target_profile);
    return vae::rank_items(scores, fold_in, request.top_n);
}

namespace {

std::vector<double> reencode(const textenc::TextEncoderModel& text, const std::vector<std::size_t>& top,
                             const data::ItemEmbeddingTable& embeddings, const ShiftConfig& cfg, Rng& rng)
{
    std::vector<double> mean(text.styles(), 0.0);
    for (std::size_t r = 0; r < cfg.resamples; ++r) {
        const auto picked = data::sample_items(top, cfg.sample, rng);
        const auto profile = textenc::encode(text, data::mean_embedding(picked, embeddings)).values;
        for (std::size_t s = 0; s < mean.size(); ++s)
            mean[s] += profile[s] / static_cast<double>(cfg.resamples);
    }
    return mean;
}

double overlap(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b)
{
    if (a.empty())
        return 0.0;
    std::unordered_set<std::size_t> set(b.begin(), b.end());
    std::size_t n = 0;
    for (std::size_t i : a)
        n += set.count(i);
    return static_cast<double>(n) / static_cast<double>(a.size());
}

} // namespace

double InjectionShift::relative_increase(std::size_t s) const
{
    return (injected_presence.at(s) - identity_presence.at(s)) / identity_presence.at(s);
}

double InjectionShift::mean_relative_increase() const
{
    double sum = 0.0;
    for (std::size_t s = 0; s < injected_presence.size(); ++s)
        sum += relative_increase(s);
    return injected_presence.empty() ? 0.0 : sum / static_cast<double>(injected_presence.size());
}

bool InjectionShift::diagonal_positive() const
{
    for (std::size_t s = 0; s < shift.rows(); ++s)
        if (!(shift(s, s) > 0.0))
            return false;
    return true;
}

bool InjectionShift::diagonal_row_maximal() const
{
    for (std::size_t s = 0; s < shift.rows(); ++s)
        for (std::size_t c = 0; c < shift.cols(); ++c)
            if (c != s && shift(s, c) >= shift(s, s))
                return false;
    return true;
}

InjectionShift measure_injection_shift(const vae::ClickVaeModel& model, const textenc::TextEncoderModel& text,
                                       std::span<const std::vector<std::size_t>> fold_ins,
                                       const data::ItemEmbeddingTable& embeddings, const ShiftConfig& config,
                                       std::uint64_t seed)
{
    if (fold_ins.empty())
        throw ConfigError("injection shift needs at least one user");
    if (config.top_n < 1 || config.sample < 1 || config.resamples < 1)
        throw ConfigError("injection shift needs top-n, sample and resamples of at least 1");
    const std::size_t S = model.styles();
    InjectionShift out;
    out.style_names = model.style_names;
    out.users = fold_ins.size();
    out.shift = nn::Tensor2(S, S);
    out.injected_presence.assign(S, 0.0);
    out.identity_presence.assign(S, 0.0);
    out.rank_overlap.assign(S, 0.0);
    const double n = static_cast<double>(fold_ins.size());

    for (std::size_t u = 0; u < fold_ins.size(); ++u) {
        const auto& fold = fold_ins[u];
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(u)));
        const auto learned = vae::learned_profile(&text, fold, embeddings, config.profile);
        const auto identity_top = vae::rank_items(vae::score_items(model, fold, learned, learned), fold, config.top_n);
        const auto identity_measured = reencode(text, identity_top, embeddings, config, rng);
        for (std::size_t s = 0; s < S; ++s) {
            const auto target = one_hot(S, s);
            const auto top = vae::rank_items(vae::score_items(model, fold, learned, target), fold, config.top_n);
            const auto measured = reencode(text, top, embeddings, config, rng);
            for (std::size_t c = 0; c < S; ++c)
                out.shift(s, c) += (measured[c] - learned[c]) / n;
            out.injected_presence[s] += measured[s] / n;
            out.identity_presence[s] += identity_measured[s] / n;
            out.rank_overlap[s] += overlap(top, identity_top) / n;
        }
    }
    for (std::size_t s = 0; s < S; ++s) {
        char line[160];
        std::snprintf(line, sizeof line, "inject %s: mean top-%zu overlap with identity %.3f",
                      out.style_names[s].c_str(), config.top_n, out.rank_overlap[s]);
        log::info(line);
    }
    return out;
}

} // namespace scr::inject
