#include "scr/data/synth.hpp"

#include "scr/core/errors.hpp"
#include "scr/data/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace scr::data {

namespace {

std::string padded(char prefix, std::size_t i, std::size_t width)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, static_cast<int>(width), i);
    return buf;
}

std::size_t digits(std::size_t n)
{
    std::size_t d = 1;
    while (n >= 10) {
        n /= 10;
        ++d;
    }
    return d;
}

void validate(const SynthConfig& c)
{
    if (c.users < 2 || c.items < 1 || c.styles < 1 || c.dim < 1)
        throw ConfigError("synthetic dataset needs >= 2 users and >= 1 item, style and dimension");
    if (c.styles > c.items)
        throw ConfigError("more styles than items");
    if (!(c.density > 0.0 && c.density * 1.4 * static_cast<double>(c.items) <= static_cast<double>(c.items)))
        throw ConfigError("density must be in (0, 1/1.4]");
    if (c.density * static_cast<double>(c.items) < 2.0)
        throw ConfigError("density too low: fewer than 2 expected clicks per user");
    if (!(c.noise >= 0.0) || !(c.multi_style_rate >= 0.0 && c.multi_style_rate <= 1.0) ||
        !(c.label_fraction > 0.0 && c.label_fraction <= 1.0) || !(c.second_style_rate >= 0.0 && c.second_style_rate <= 1.0) ||
        !(c.background >= 0.0) || !(c.secondary_weight >= 0.0) || !(c.popularity_sigma >= 0.0))
        throw ConfigError("synthetic generator parameter out of range");
    if (c.styles < 2 && (c.multi_style_rate > 0.0 || c.second_style_rate > 0.0))
        throw ConfigError("multi-style items and users need at least 2 styles");
}

nn::Tensor2 draw_centroids(std::size_t styles, std::size_t dim, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    nn::Tensor2 c(styles, dim);
    for (std::size_t s = 0; s < styles; ++s) {
        auto row = c.row(s);
        for (double& x : row)
            x = normal(rng);
        // Gram-Schmidt against earlier centroids while there is room for orthogonality.
        if (s < dim) {
            for (std::size_t p = 0; p < s; ++p) {
                auto prev = c.row(p);
                const double dot = std::inner_product(row.begin(), row.end(), prev.begin(), 0.0);
                for (std::size_t j = 0; j < dim; ++j)
                    row[j] -= dot * prev[j];
            }
        }
        const double norm = std::sqrt(std::inner_product(row.begin(), row.end(), row.begin(), 0.0));
        for (double& x : row)
            x /= norm;
    }
    return c;
}

} // namespace

SynthDataset synth_generate(const SynthConfig& config, Rng& rng)
{
    validate(config);
    const std::size_t S = config.styles, I = config.items, U = config.users, D = config.dim;
    SynthDataset ds;
    ds.centroids = draw_centroids(S, D, rng);

    // Item styles: the first S items cover every style once; the rest draw a uniform primary.
    std::uniform_int_distribution<std::size_t> any_style(0, S - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    ds.item_styles = nn::Tensor2(I, S);
    ds.primary_style.resize(I);
    std::vector<std::vector<std::size_t>> styles_of(I);
    for (std::size_t i = 0; i < I; ++i) {
        const std::size_t primary = i < S ? i : any_style(rng);
        ds.primary_style[i] = primary;
        styles_of[i].push_back(primary);
        if (S >= 2 && unit(rng) < config.multi_style_rate) {
            const std::size_t extra = (S >= 3 && unit(rng) < 0.5) ? 2 : 1;
            while (styles_of[i].size() < 1 + extra) {
                const std::size_t s = any_style(rng);
                if (std::find(styles_of[i].begin(), styles_of[i].end(), s) == styles_of[i].end())
                    styles_of[i].push_back(s);
            }
        }
        for (std::size_t s : styles_of[i])
            ds.item_styles(i, s) = 1.0;
    }

    nn::Tensor2 vectors(I, D);
    for (std::size_t i = 0; i < I; ++i) {
        auto row = vectors.row(i);
        for (std::size_t s : styles_of[i]) {
            auto c = ds.centroids.row(s);
            for (std::size_t j = 0; j < D; ++j)
                row[j] += c[j] / static_cast<double>(styles_of[i].size());
        }
        if (config.noise > 0.0)
            for (double& x : row)
                x += config.noise * normal(rng);
    }

    std::vector<double> popularity(I);
    for (double& p : popularity)
        p = std::exp(config.popularity_sigma * normal(rng));

    // User preferences: one or two dominant styles over a small uniform background.
    ds.preferences = nn::Tensor2(U, S);
    ds.dominant.resize(U);
    for (std::size_t u = 0; u < U; ++u) {
        auto pref = ds.preferences.row(u);
        std::fill(pref.begin(), pref.end(), config.background);
        const std::size_t first = any_style(rng);
        pref[first] = 1.0;
        ds.dominant[u].push_back(first);
        if (S >= 2 && unit(rng) < config.second_style_rate) {
            std::size_t second = any_style(rng);
            while (second == first)
                second = any_style(rng);
            pref[second] = 0.5 + 0.5 * unit(rng);
            ds.dominant[u].push_back(second);
        }
        const double total = std::accumulate(pref.begin(), pref.end(), 0.0);
        for (double& p : pref)
            p /= total;
    }

    // Clicks: weighted sampling without replacement via exponential keys (smallest -log(u)/w).
    const double mean_clicks = config.density * static_cast<double>(I);
    std::vector<std::vector<std::size_t>> rows(U);
    std::vector<std::pair<double, std::size_t>> keys(I);
    for (std::size_t u = 0; u < U; ++u) {
        auto pref = ds.preferences.row(u);
        const auto n = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::lround(mean_clicks * (0.6 + 0.8 * unit(rng)))), 2, I);
        for (std::size_t i = 0; i < I; ++i) {
            double affinity = pref[ds.primary_style[i]];
            for (std::size_t k = 1; k < styles_of[i].size(); ++k)
                affinity += config.secondary_weight * pref[styles_of[i][k]];
            const double w = popularity[i] * affinity;
            double r = unit(rng);
            while (r <= 0.0)
                r = unit(rng);
            keys[i] = {-std::log(r) / w, i};
        }
        std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n), keys.end());
        for (std::size_t k = 0; k < n; ++k)
            rows[u].push_back(keys[k].second);
    }

    std::vector<std::string> user_ids(U), item_ids(I);
    for (std::size_t u = 0; u < U; ++u)
        user_ids[u] = padded('u', u + 1, digits(U));
    for (std::size_t i = 0; i < I; ++i)
        item_ids[i] = padded('i', i + 1, digits(I));
    ds.clicks = ClickMatrix(user_ids, item_ids, std::move(rows));
    ds.embeddings = ItemEmbeddingTable(item_ids, std::move(vectors));

    // Labels on a random subset of items, listed in catalog order.
    const auto n_labeled = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(config.label_fraction * static_cast<double>(I))));
    std::vector<std::size_t> all(I);
    std::iota(all.begin(), all.end(), 0);
    auto labeled = sample_items(all, std::min(n_labeled, I), rng);
    std::sort(labeled.begin(), labeled.end());
    std::vector<std::string> style_names(S), label_items;
    for (std::size_t s = 0; s < S; ++s)
        style_names[s] = "style" + std::to_string(s + 1);
    std::vector<std::uint8_t> label_bits;
    for (std::size_t i : labeled) {
        label_items.push_back(item_ids[i]);
        for (std::size_t s = 0; s < S; ++s)
            label_bits.push_back(ds.item_styles(i, s) != 0.0 ? 1 : 0);
    }
    ds.labels = StyleLabelMatrix(std::move(style_names), std::move(label_items), std::move(label_bits));
    return ds;
}

double synth_style_agreement(const SynthDataset& ds)
{
    std::size_t match = 0, total = 0;
    for (std::size_t u = 0; u < ds.clicks.num_users(); ++u) {
        const auto& dom = ds.dominant[u];
        for (std::size_t i : ds.clicks.items_of(u)) {
            match += std::find(dom.begin(), dom.end(), ds.primary_style[i]) != dom.end() ? 1 : 0;
            ++total;
        }
    }
    return total ? static_cast<double>(match) / static_cast<double>(total) : 0.0;
}

} // namespace scr::data
