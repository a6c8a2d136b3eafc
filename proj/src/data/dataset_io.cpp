#include "scr/data/dataset_io.hpp"

#include "scr/core/errors.hpp"
#include "scr/core/format.hpp"
#include "scr/core/log.hpp"
#include "scr/core/rng.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_map>

namespace scr::data {

namespace {

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what)
{
    throw DataError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

/// Splits "key<TAB>value"; blank lines yield false.
bool split_record(std::string_view raw, std::string_view source, std::size_t line, std::string_view& key,
                  std::string_view& value)
{
    if (!raw.empty() && raw.back() == '\r')
        raw.remove_suffix(1);
    if (trim(raw).empty())
        return false;
    auto tab = raw.find('\t');
    if (tab == std::string_view::npos)
        fail(source, line, "expected two tab-separated fields");
    key = trim(raw.substr(0, tab));
    value = trim(raw.substr(tab + 1));
    if (key.empty() || value.empty())
        fail(source, line, "empty field");
    if (value.find('\t') != std::string_view::npos)
        fail(source, line, "more than two tab-separated fields");
    return true;
}

std::ifstream open(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + path.string());
    return in;
}

} // namespace

ClickMatrix read_clicks(std::istream& in, std::string_view source, std::size_t* duplicates)
{
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view user, item;
        if (split_record(raw, source, line, user, item))
            pairs.emplace_back(std::string(user), std::string(item));
    }
    return clicks_from_pairs(pairs, duplicates);
}

ItemEmbeddingTable read_embeddings(std::istream& in, std::string_view source)
{
    std::vector<std::string> ids;
    std::vector<double> values;
    std::size_t dim = 0;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view id, vec;
        if (!split_record(raw, source, line, id, vec))
            continue;
        auto parts = split(vec, ',');
        if (ids.empty())
            dim = parts.size();
        else if (parts.size() != dim)
            fail(source, line,
                 "embedding has " + std::to_string(parts.size()) + " values, expected " + std::to_string(dim));
        for (auto p : parts) {
            auto v = parse_double(p);
            if (!v || !std::isfinite(*v))
                fail(source, line, "bad number '" + std::string(p) + "'");
            values.push_back(*v);
        }
        ids.emplace_back(id);
    }
    const std::size_t n = ids.size();
    try {
        return ItemEmbeddingTable(std::move(ids), nn::Tensor2(n, dim, std::move(values)));
    } catch (const DataError& e) {
        throw DataError(std::string(source) + ": " + e.what());
    }
}

StyleLabelMatrix read_labels(std::istream& in, std::string_view source)
{
    std::vector<std::string> styles;
    std::unordered_map<std::string, std::size_t> style_index;
    std::vector<std::string> items;
    std::vector<std::vector<std::size_t>> item_styles;
    std::unordered_map<std::string, std::size_t> seen;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view id, list;
        if (!split_record(raw, source, line, id, list))
            continue;
        if (!seen.emplace(std::string(id), items.size()).second)
            fail(source, line, "item '" + std::string(id) + "' labeled twice");
        auto& row = item_styles.emplace_back();
        for (auto name : split(list, '|')) {
            name = trim(name);
            if (name.empty())
                fail(source, line, "empty style name");
            auto [it, fresh] = style_index.try_emplace(std::string(name), styles.size());
            if (fresh)
                styles.emplace_back(name);
            row.push_back(it->second);
        }
        items.emplace_back(id);
    }
    std::vector<std::uint8_t> labels(items.size() * styles.size(), 0);
    for (std::size_t r = 0; r < items.size(); ++r)
        for (std::size_t s : item_styles[r])
            labels[r * styles.size() + s] = 1;
    return StyleLabelMatrix(std::move(styles), std::move(items), std::move(labels));
}

void write_clicks(std::ostream& out, const ClickMatrix& clicks)
{
    for (std::size_t u = 0; u < clicks.num_users(); ++u)
        for (std::size_t i : clicks.items_of(u))
            out << clicks.user_ids()[u] << '\t' << clicks.item_ids()[i] << '\n';
}

void write_embeddings(std::ostream& out, const ItemEmbeddingTable& table)
{
    for (std::size_t r = 0; r < table.size(); ++r) {
        out << table.item_ids()[r] << '\t';
        auto v = table.vector(r);
        for (std::size_t j = 0; j < v.size(); ++j)
            out << (j ? "," : "") << format_double(v[j]);
        out << '\n';
    }
}

void write_labels(std::ostream& out, const StyleLabelMatrix& labels)
{
    for (std::size_t r = 0; r < labels.num_items(); ++r) {
        out << labels.item_ids()[r] << '\t';
        bool first = true;
        auto row = labels.labels_of(r);
        for (std::size_t s = 0; s < row.size(); ++s) {
            if (!row[s])
                continue;
            out << (first ? "" : "|") << labels.style_names()[s];
            first = false;
        }
        out << '\n';
    }
}

Dataset load_dataset(const std::filesystem::path& clicks_path, const std::filesystem::path& embeddings_path,
                     const std::filesystem::path& labels_path)
{
    Dataset ds;
    {
        auto in = open(clicks_path);
        ds.clicks = read_clicks(in, clicks_path.string(), &ds.report.duplicate_clicks);
    }
    if (ds.report.duplicate_clicks)
        log::warn(std::to_string(ds.report.duplicate_clicks) + " duplicate click lines ignored");
    {
        auto in = open(embeddings_path);
        ds.embeddings = read_embeddings(in, embeddings_path.string()).select(ds.clicks.item_ids());
    }
    {
        auto in = open(labels_path);
        auto all = read_labels(in, labels_path.string());
        ds.labels = all.restrict_to(ds.clicks.item_ids(), &ds.report.dropped_labels);
    }
    if (ds.report.dropped_labels)
        log::warn(std::to_string(ds.report.dropped_labels) + " labeled items are not in the click catalog; dropped");
    return ds;
}

Dataset restrict_to_clicks(const Dataset& source, ClickMatrix clicks)
{
    Dataset ds;
    ds.embeddings = source.embeddings.select(clicks.item_ids());
    ds.labels = source.labels.restrict_to(clicks.item_ids());
    ds.clicks = std::move(clicks);
    ds.report = source.report;
    return ds;
}

std::uint64_t file_checksum(const std::filesystem::path& path)
{
    auto in = open(path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a64(bytes);
}

} // namespace scr::data
