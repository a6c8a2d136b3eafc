#include "scr/data/item_table.hpp"

#include "scr/core/errors.hpp"

#include <algorithm>
#include <unordered_set>

namespace scr::data {

ItemEmbeddingTable::ItemEmbeddingTable(std::vector<std::string> item_ids, nn::Tensor2 vectors)
    : ids_(std::move(item_ids)), vectors_(std::move(vectors))
{
    if (ids_.size() != vectors_.rows())
        throw ShapeError("embedding table has " + std::to_string(ids_.size()) + " ids but " +
                         std::to_string(vectors_.rows()) + " vectors");
    if (!vectors_.all_finite())
        throw DataError("embedding table contains non-finite values");
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i)
        if (!index_.emplace(ids_[i], i).second)
            throw DataError("duplicate embedding for item '" + ids_[i] + "'");
}

std::optional<std::size_t> ItemEmbeddingTable::find(std::string_view id) const
{
    auto it = index_.find(std::string(id));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

ItemEmbeddingTable ItemEmbeddingTable::select(const std::vector<std::string>& ids) const
{
    nn::Tensor2 out(ids.size(), dim());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        auto row = find(ids[r]);
        if (!row)
            throw DataError("item '" + ids[r] + "' has clicks but no embedding");
        auto src = vector(*row);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return ItemEmbeddingTable(ids, std::move(out));
}

StyleLabelMatrix::StyleLabelMatrix(std::vector<std::string> style_names, std::vector<std::string> item_ids,
                                   std::vector<std::uint8_t> labels)
    : styles_(std::move(style_names)), items_(std::move(item_ids)), labels_(std::move(labels))
{
    if (labels_.size() != items_.size() * styles_.size())
        throw ShapeError("label matrix storage does not match items × styles");
    std::unordered_set<std::string_view> names;
    for (const auto& s : styles_)
        if (!names.insert(s).second)
            throw DataError("duplicate style name '" + s + "'");
    for (std::size_t r = 0; r < items_.size(); ++r) {
        auto row = labels_of(r);
        if (std::none_of(row.begin(), row.end(), [](std::uint8_t v) { return v != 0; }))
            throw DataError("labeled item '" + items_[r] + "' has no style");
        if (!index_.emplace(items_[r], r).second)
            throw DataError("item '" + items_[r] + "' labeled twice");
    }
}

std::optional<std::size_t> StyleLabelMatrix::find(std::string_view id) const
{
    auto it = index_.find(std::string(id));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::vector<std::ptrdiff_t> StyleLabelMatrix::rows_for(const std::vector<std::string>& catalog) const
{
    std::vector<std::ptrdiff_t> rows(catalog.size(), -1);
    for (std::size_t i = 0; i < catalog.size(); ++i)
        if (auto r = find(catalog[i]))
            rows[i] = static_cast<std::ptrdiff_t>(*r);
    return rows;
}

StyleLabelMatrix StyleLabelMatrix::restrict_to(const std::vector<std::string>& catalog, std::size_t* dropped) const
{
    std::unordered_set<std::string_view> keep(catalog.begin(), catalog.end());
    std::vector<std::string> items;
    std::vector<std::uint8_t> labels;
    for (std::size_t r = 0; r < items_.size(); ++r) {
        if (!keep.count(items_[r]))
            continue;
        items.push_back(items_[r]);
        auto row = labels_of(r);
        labels.insert(labels.end(), row.begin(), row.end());
    }
    if (dropped)
        *dropped = items_.size() - items.size();
    return StyleLabelMatrix(styles_, std::move(items), std::move(labels));
}

std::optional<std::size_t> StyleLabelMatrix::style_index(std::string_view name) const
{
    auto it = std::find(styles_.begin(), styles_.end(), name);
    if (it == styles_.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - styles_.begin());
}

} // namespace scr::data
