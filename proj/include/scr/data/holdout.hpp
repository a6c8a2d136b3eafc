#pragma once

#include "scr/core/rng.hpp"
#include "scr/data/click_matrix.hpp"

#include <vector>

namespace scr::data {

/// Masked-click evaluation split over a set of held-out users.
struct HoldoutSplit {
    ClickMatrix train;                              ///< rows of every non-held-out user
    std::vector<std::size_t> train_users;           ///< source row of each train row
    std::vector<std::size_t> heldout_users;         ///< source rows, ascending
    std::vector<std::vector<std::size_t>> fold_in;  ///< interaction order preserved
    std::vector<std::vector<std::size_t>> masked;   ///< ascending item index
};

/// max(1, floor(fraction · n)).
std::size_t masked_count(std::size_t n, double fraction);

/**
 * Picks `n_heldout` users uniformly among those with at least two clicks and
 * masks masked_count() of each one's clicks. Held-out users are excluded from
 * the training matrix entirely.
 */
HoldoutSplit holdout_split(const ClickMatrix& clicks, std::size_t n_heldout, double mask_fraction, Rng& rng);

} // namespace scr::data
