#include "scr/data/click_matrix.hpp"

#include "scr/core/errors.hpp"

#include <unordered_map>
#include <unordered_set>

namespace scr::data {

namespace {
void require_unique(const std::vector<std::string>& ids, const char* what)
{
    std::unordered_set<std::string_view> seen;
    for (const auto& id : ids)
        if (!seen.insert(id).second)
            throw DataError(std::string("duplicate ") + what + " id '" + id + "'");
}
} // namespace

ClickMatrix::ClickMatrix(std::vector<std::string> user_ids, std::vector<std::string> item_ids,
                         std::vector<std::vector<std::size_t>> user_items)
    : user_ids_(std::move(user_ids)), item_ids_(std::move(item_ids)), rows_(std::move(user_items))
{
    if (rows_.size() != user_ids_.size())
        throw ShapeError("click matrix has " + std::to_string(user_ids_.size()) + " user ids but " +
                         std::to_string(rows_.size()) + " rows");
    require_unique(user_ids_, "user");
    require_unique(item_ids_, "item");
    std::vector<std::size_t> last_seen(item_ids_.size(), SIZE_MAX);
    for (std::size_t u = 0; u < rows_.size(); ++u) {
        for (std::size_t item : rows_[u]) {
            if (item >= item_ids_.size())
                throw ShapeError("item index " + std::to_string(item) + " out of range for user '" +
                                 user_ids_[u] + "'");
            if (last_seen[item] == u)
                throw DataError("user '" + user_ids_[u] + "' lists item '" + item_ids_[item] + "' twice");
            last_seen[item] = u;
        }
        interactions_ += rows_[u].size();
    }
}

std::vector<std::size_t> ClickMatrix::item_degrees() const
{
    std::vector<std::size_t> deg(num_items(), 0);
    for (const auto& row : rows_)
        for (std::size_t i : row)
            ++deg[i];
    return deg;
}

ClickMatrix ClickMatrix::select_users(std::span<const std::size_t> users) const
{
    std::vector<std::string> ids;
    std::vector<std::vector<std::size_t>> rows;
    ids.reserve(users.size());
    rows.reserve(users.size());
    for (std::size_t u : users) {
        ids.push_back(user_ids_.at(u));
        rows.push_back(rows_.at(u));
    }
    return ClickMatrix(std::move(ids), item_ids_, std::move(rows));
}

ClickMatrix clicks_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                              std::size_t* duplicates)
{
    std::unordered_map<std::string, std::size_t> user_index, item_index;
    std::vector<std::string> user_ids, item_ids;
    std::vector<std::vector<std::size_t>> rows;
    std::vector<std::unordered_set<std::size_t>> seen;
    std::size_t dups = 0;
    for (const auto& [user, item] : pairs) {
        auto [uit, unew] = user_index.try_emplace(user, user_ids.size());
        if (unew) {
            user_ids.push_back(user);
            rows.emplace_back();
            seen.emplace_back();
        }
        auto [iit, inew] = item_index.try_emplace(item, item_ids.size());
        if (inew)
            item_ids.push_back(item);
        const std::size_t u = uit->second;
        if (seen[u].insert(iit->second).second)
            rows[u].push_back(iit->second);
        else
            ++dups;
    }
    if (duplicates)
        *duplicates = dups;
    return ClickMatrix(std::move(user_ids), std::move(item_ids), std::move(rows));
}

ClickMatrix filter_interactions(const ClickMatrix& clicks, std::size_t min_items_per_user,
                                std::size_t min_users_per_item)
{
    if (min_items_per_user < 1 || min_users_per_item < 1)
        throw ConfigError("filter thresholds must be at least 1");

    std::vector<char> user_alive(clicks.num_users(), 1), item_alive(clicks.num_items(), 1);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::size_t> item_deg(clicks.num_items(), 0);
        for (std::size_t u = 0; u < clicks.num_users(); ++u) {
            if (!user_alive[u])
                continue;
            std::size_t n = 0;
            for (std::size_t i : clicks.items_of(u))
                n += item_alive[i] ? 1 : 0;
            if (n < min_items_per_user) {
                user_alive[u] = 0;
                changed = true;
                continue;
            }
            for (std::size_t i : clicks.items_of(u))
                if (item_alive[i])
                    ++item_deg[i];
        }
        for (std::size_t i = 0; i < clicks.num_items(); ++i) {
            if (item_alive[i] && item_deg[i] < min_users_per_item) {
                item_alive[i] = 0;
                changed = true;
            }
        }
    }

    std::vector<std::size_t> new_item(clicks.num_items(), SIZE_MAX);
    std::vector<std::string> item_ids;
    for (std::size_t i = 0; i < clicks.num_items(); ++i) {
        if (item_alive[i]) {
            new_item[i] = item_ids.size();
            item_ids.push_back(clicks.item_ids()[i]);
        }
    }
    std::vector<std::string> user_ids;
    std::vector<std::vector<std::size_t>> rows;
    for (std::size_t u = 0; u < clicks.num_users(); ++u) {
        if (!user_alive[u])
            continue;
        user_ids.push_back(clicks.user_ids()[u]);
        auto& row = rows.emplace_back();
        for (std::size_t i : clicks.items_of(u))
            if (item_alive[i])
                row.push_back(new_item[i]);
    }
    if (user_ids.empty() || item_ids.empty())
        throw DataError("interaction filter (" + std::to_string(min_items_per_user) + " items/user, " +
                        std::to_string(min_users_per_item) +
                        " users/item) removed every interaction; lower the thresholds");
    return ClickMatrix(std::move(user_ids), std::move(item_ids), std::move(rows));
}

} // namespace scr::data
