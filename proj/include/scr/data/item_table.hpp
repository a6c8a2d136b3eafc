#pragma once

#include "scr/nn/tensor.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace scr::data {

/// Dense item × D content embeddings keyed by item id.
class ItemEmbeddingTable {
public:
    ItemEmbeddingTable() = default;
    ItemEmbeddingTable(std::vector<std::string> item_ids, nn::Tensor2 vectors);

    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t dim() const noexcept { return vectors_.cols(); }
    const std::vector<std::string>& item_ids() const noexcept { return ids_; }
    const nn::Tensor2& vectors() const noexcept { return vectors_; }
    std::span<const double> vector(std::size_t row) const { return vectors_.row(row); }

    std::optional<std::size_t> find(std::string_view id) const;

    /// Table re-ordered to `ids`; throws DataError naming the first id without an embedding.
    ItemEmbeddingTable select(const std::vector<std::string>& ids) const;

private:
    std::vector<std::string> ids_;
    nn::Tensor2 vectors_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Binary multi-label item × S style matrix. Every labeled item carries at least one style.
class StyleLabelMatrix {
public:
    StyleLabelMatrix() = default;
    StyleLabelMatrix(std::vector<std::string> style_names, std::vector<std::string> item_ids,
                     std::vector<std::uint8_t> labels);

    std::size_t num_styles() const noexcept { return styles_.size(); }
    std::size_t num_items() const noexcept { return items_.size(); }
    const std::vector<std::string>& style_names() const noexcept { return styles_; }
    const std::vector<std::string>& item_ids() const noexcept { return items_; }

    std::span<const std::uint8_t> labels_of(std::size_t row) const
    {
        return {labels_.data() + row * styles_.size(), styles_.size()};
    }

    std::optional<std::size_t> find(std::string_view id) const;

    /// For each catalog item, its label row or -1 when unlabeled.
    std::vector<std::ptrdiff_t> rows_for(const std::vector<std::string>& catalog) const;

    /// Labels restricted to items present in `catalog`; `dropped` receives the number removed.
    StyleLabelMatrix restrict_to(const std::vector<std::string>& catalog, std::size_t* dropped = nullptr) const;

    /// Index of `name` in the vocabulary.
    std::optional<std::size_t> style_index(std::string_view name) const;

private:
    std::vector<std::string> styles_;
    std::vector<std::string> items_;
    std::vector<std::uint8_t> labels_;
    std::unordered_map<std::string, std::size_t> index_;
};

} // namespace scr::data
