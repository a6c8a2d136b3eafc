#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace scr::data {

/**
 * Sparse binary user × item interaction matrix.
 *
 * Each user's row keeps its items in interaction order (file order for loaded
 * data), which is what the recency-based profile mode reads. Rows never hold
 * the same item twice.
 */
class ClickMatrix {
public:
    ClickMatrix() = default;
    ClickMatrix(std::vector<std::string> user_ids, std::vector<std::string> item_ids,
                std::vector<std::vector<std::size_t>> user_items);

    std::size_t num_users() const noexcept { return user_ids_.size(); }
    std::size_t num_items() const noexcept { return item_ids_.size(); }
    std::size_t num_interactions() const noexcept { return interactions_; }

    const std::vector<std::string>& user_ids() const noexcept { return user_ids_; }
    const std::vector<std::string>& item_ids() const noexcept { return item_ids_; }

    std::span<const std::size_t> items_of(std::size_t user) const { return rows_.at(user); }
    const std::vector<std::vector<std::size_t>>& rows() const noexcept { return rows_; }

    /// Number of users interacting with each item.
    std::vector<std::size_t> item_degrees() const;

    /// Sub-matrix over the given users (same item catalog), in the given order.
    ClickMatrix select_users(std::span<const std::size_t> users) const;

    friend bool operator==(const ClickMatrix&, const ClickMatrix&) = default;

private:
    std::vector<std::string> user_ids_;
    std::vector<std::string> item_ids_;
    std::vector<std::vector<std::size_t>> rows_;
    std::size_t interactions_ = 0;
};

/// Builds a matrix from (user, item) id pairs; ids are indexed by first appearance.
/// Repeated pairs are dropped and counted in `duplicates`.
ClickMatrix clicks_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                              std::size_t* duplicates = nullptr);

/**
 * Alternately drops users with fewer than `min_items_per_user` interactions and
 * items with fewer than `min_users_per_item` users until nothing changes.
 * Surviving users and items keep their relative order. Throws DataError when
 * nothing survives.
 */
ClickMatrix filter_interactions(const ClickMatrix& clicks, std::size_t min_items_per_user,
                                std::size_t min_users_per_item);

} // namespace scr::data
