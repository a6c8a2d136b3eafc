#include "scr/data/sampling.hpp"

#include "scr/core/errors.hpp"
#include "scr/core/log.hpp"

#include <algorithm>

namespace scr::data {

std::vector<std::size_t> sample_items(std::span<const std::size_t> pool, std::size_t k, Rng& rng)
{
    if (pool.empty())
        throw DataError("cannot sample from an empty item pool");
    std::vector<std::size_t> out;
    out.reserve(k);
    if (pool.size() >= k) {
        // Partial Fisher-Yates.
        std::vector<std::size_t> work(pool.begin(), pool.end());
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, work.size() - 1);
            std::swap(work[i], work[pick(rng)]);
            out.push_back(work[i]);
        }
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        for (std::size_t i = 0; i < k; ++i)
            out.push_back(pool[pick(rng)]);
    }
    return out;
}

std::vector<double> mean_embedding(std::span<const std::size_t> items, const ItemEmbeddingTable& embeddings)
{
    std::vector<double> mean(embeddings.dim(), 0.0);
    for (std::size_t item : items) {
        if (item >= embeddings.size())
            throw ShapeError("item index " + std::to_string(item) + " has no embedding row");
        auto v = embeddings.vector(item);
        for (std::size_t j = 0; j < mean.size(); ++j)
            mean[j] += v[j];
    }
    if (!items.empty())
        for (double& x : mean)
            x /= static_cast<double>(items.size());
    return mean;
}

std::vector<double> user_content_vector(std::span<const std::size_t> clicked, const ItemEmbeddingTable& embeddings,
                                        std::size_t k, Rng& rng, std::string_view user_id)
{
    if (k == 0)
        throw ConfigError("content sample size k must be at least 1");
    if (clicked.empty())
        throw DataError("user '" + std::string(user_id) + "' has no embeddable clicked items");
    auto items = sample_items(clicked, k, rng);
    return mean_embedding(items, embeddings);
}

std::vector<double> recent_content_vector(std::span<const std::size_t> clicked, const ItemEmbeddingTable& embeddings,
                                          std::size_t k, std::string_view user_id)
{
    if (k == 0)
        throw ConfigError("content sample size k must be at least 1");
    if (clicked.empty())
        throw DataError("user '" + std::string(user_id) + "' has no embeddable clicked items");
    const std::size_t n = std::min(k, clicked.size());
    return mean_embedding(clicked.subspan(clicked.size() - n), embeddings);
}

std::vector<double> threshold_profile(std::span<const double> masses, std::size_t k, ThresholdRule rule)
{
    const double theta = 1.0 / static_cast<double>(k);
    constexpr double slack = 1e-12;
    std::vector<double> out(masses.size());
    for (std::size_t s = 0; s < masses.size(); ++s)
        out[s] = rule == ThresholdRule::at_least ? (masses[s] >= theta - slack ? 1.0 : 0.0)
                                                 : (masses[s] > theta + slack ? 1.0 : 0.0);
    return out;
}

LabeledProfileDataset LabeledProfileDataset::subset(std::span<const std::size_t> rows) const
{
    LabeledProfileDataset out;
    out.vectors = nn::Tensor2(rows.size(), vectors.cols());
    out.profiles = nn::Tensor2(rows.size(), profiles.cols());
    out.style_names = style_names;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::copy_n(vectors.row(rows[r]).begin(), vectors.cols(), out.vectors.row(r).begin());
        std::copy_n(profiles.row(rows[r]).begin(), profiles.cols(), out.profiles.row(r).begin());
        if (!source_users.empty())
            out.source_users.push_back(source_users.at(rows[r]));
        if (!sampled_items.empty())
            out.sampled_items.push_back(sampled_items.at(rows[r]));
    }
    return out;
}

LabeledProfileDataset build_labelprop_dataset(const ClickMatrix& clicks, const StyleLabelMatrix& labels,
                                              const ItemEmbeddingTable& embeddings, const LabelPropConfig& config,
                                              Rng& rng)
{
    if (config.repeats < 1 || config.k < 1)
        throw ConfigError("label propagation needs repeats >= 1 and k >= 1");
    if (embeddings.size() != clicks.num_items())
        throw ShapeError("embeddings are not aligned to the click catalog");

    const std::size_t styles = labels.num_styles();
    const auto label_row = labels.rows_for(clicks.item_ids());

    std::vector<std::vector<std::size_t>> labeled_clicks(clicks.num_users());
    for (std::size_t u = 0; u < clicks.num_users(); ++u)
        for (std::size_t i : clicks.items_of(u))
            if (label_row[i] >= 0)
                labeled_clicks[u].push_back(i);

    std::vector<double> vectors, profiles;
    LabeledProfileDataset ds;
    ds.style_names = labels.style_names();
    std::size_t all_zero = 0;
    for (std::size_t rep = 0; rep < config.repeats; ++rep) {
        for (std::size_t u = 0; u < clicks.num_users(); ++u) {
            if (labeled_clicks[u].empty())
                continue;
            auto items = sample_items(labeled_clicks[u], config.k, rng);
            std::vector<double> mass(styles, 0.0);
            for (std::size_t i : items) {
                auto row = labels.labels_of(static_cast<std::size_t>(label_row[i]));
                for (std::size_t s = 0; s < styles; ++s)
                    mass[s] += row[s];
            }
            for (double& m : mass)
                m /= static_cast<double>(items.size());
            auto profile = threshold_profile(mass, config.k, config.rule);
            if (std::none_of(profile.begin(), profile.end(), [](double v) { return v != 0.0; })) {
                ++all_zero;
                continue;
            }
            auto v = mean_embedding(items, embeddings);
            vectors.insert(vectors.end(), v.begin(), v.end());
            profiles.insert(profiles.end(), profile.begin(), profile.end());
            ds.source_users.push_back(u);
            ds.sampled_items.push_back(std::move(items));
        }
    }
    if (all_zero)
        log::warn(std::to_string(all_zero) + " label-propagation samples had no style above threshold; skipped");
    const std::size_t n = ds.source_users.size();
    if (n == 0)
        throw DataError("label propagation emitted no samples (no user clicked a labeled item)");
    ds.vectors = nn::Tensor2(n, embeddings.dim(), std::move(vectors));
    ds.profiles = nn::Tensor2(n, styles, std::move(profiles));
    return ds;
}

} // namespace scr::data
