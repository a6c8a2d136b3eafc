#include "scr/data/holdout.hpp"

#include "scr/core/errors.hpp"
#include "scr/data/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace scr::data {

std::size_t masked_count(std::size_t n, double fraction)
{
    const auto m = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
    return std::max<std::size_t>(1, m);
}

HoldoutSplit holdout_split(const ClickMatrix& clicks, std::size_t n_heldout, double mask_fraction, Rng& rng)
{
    if (!(mask_fraction >= 0.0 && mask_fraction < 1.0))
        throw ConfigError("mask fraction must be in [0, 1)");
    if (n_heldout >= clicks.num_users())
        throw ConfigError("cannot hold out " + std::to_string(n_heldout) + " of " +
                          std::to_string(clicks.num_users()) + " users");

    std::vector<std::size_t> eligible;
    for (std::size_t u = 0; u < clicks.num_users(); ++u)
        if (clicks.items_of(u).size() >= 2)
            eligible.push_back(u);
    if (eligible.size() < n_heldout)
        throw DataError("only " + std::to_string(eligible.size()) + " users have the 2 clicks needed to hold out");

    auto chosen = sample_items(eligible, n_heldout, rng);
    std::sort(chosen.begin(), chosen.end());

    HoldoutSplit split;
    split.heldout_users = chosen;
    std::vector<char> is_heldout(clicks.num_users(), 0);
    for (std::size_t u : chosen)
        is_heldout[u] = 1;
    for (std::size_t u = 0; u < clicks.num_users(); ++u)
        if (!is_heldout[u])
            split.train_users.push_back(u);
    split.train = clicks.select_users(split.train_users);

    for (std::size_t u : chosen) {
        auto row = clicks.items_of(u);
        const std::size_t m = std::min(masked_count(row.size(), mask_fraction), row.size() - 1);
        auto masked = sample_items(row, m, rng);
        std::sort(masked.begin(), masked.end());
        std::vector<std::size_t> fold;
        for (std::size_t i : row)
            if (!std::binary_search(masked.begin(), masked.end(), i))
                fold.push_back(i);
        split.fold_in.push_back(std::move(fold));
        split.masked.push_back(std::move(masked));
    }
    return split;
}

} // namespace scr::data
