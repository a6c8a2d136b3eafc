#pragma once

#include "scr/data/click_matrix.hpp"
#include "scr/data/item_table.hpp"

#include <filesystem>
#include <iosfwd>

namespace scr::data {

struct LoadReport {
    std::size_t duplicate_clicks = 0;
    std::size_t dropped_labels = 0;
};

/// Clicks plus embeddings and labels aligned to the click catalog: embedding row i is item i.
struct Dataset {
    ClickMatrix clicks;
    ItemEmbeddingTable embeddings;
    StyleLabelMatrix labels;
    LoadReport report;
};

// Readers throw DataError with "<file>:<line>" context on malformed input.
ClickMatrix read_clicks(std::istream& in, std::string_view source, std::size_t* duplicates = nullptr);
ItemEmbeddingTable read_embeddings(std::istream& in, std::string_view source);
StyleLabelMatrix read_labels(std::istream& in, std::string_view source);

void write_clicks(std::ostream& out, const ClickMatrix& clicks);
void write_embeddings(std::ostream& out, const ItemEmbeddingTable& table);
void write_labels(std::ostream& out, const StyleLabelMatrix& labels);

/**
 * Loads and cross-references the three input files. Clicked items without an
 * embedding are a hard error; labeled items outside the click catalog are
 * dropped with a warning.
 */
Dataset load_dataset(const std::filesystem::path& clicks, const std::filesystem::path& embeddings,
                     const std::filesystem::path& labels);

/// Re-aligns embeddings and labels after the click matrix has been filtered.
Dataset restrict_to_clicks(const Dataset& source, ClickMatrix clicks);

/// FNV-1a 64 of a file's bytes.
std::uint64_t file_checksum(const std::filesystem::path& path);

} // namespace scr::data
