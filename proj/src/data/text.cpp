#include "scr/data/text.hpp"

#include "scr/core/errors.hpp"
#include "scr/core/log.hpp"
#include "scr/core/rng.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

namespace scr::data {

namespace {

constexpr std::array<std::string_view, 48> stopwords{
    "a",    "about", "an",   "and",  "are",   "as",   "at",   "be",    "but",  "by",   "for",  "from",
    "has",  "have",  "he",   "her",  "his",   "i",    "if",   "in",    "into", "is",   "it",   "its",
    "me",   "my",    "no",   "not",  "of",    "on",   "or",   "our",   "she",  "so",   "that", "the",
    "their", "them", "then", "there", "these", "they", "this", "to",   "was",  "we",   "with", "you"};

} // namespace

bool is_stopword(std::string_view word)
{
    return std::find(stopwords.begin(), stopwords.end(), word) != stopwords.end();
}

std::string stem(std::string_view word)
{
    auto strip = [&](std::string_view suffix) {
        return word.size() >= suffix.size() + 3 && word.substr(word.size() - suffix.size()) == suffix;
    };
    if (strip("ing"))
        return std::string(word.substr(0, word.size() - 3));
    if (strip("ed"))
        return std::string(word.substr(0, word.size() - 2));
    if (strip("s") && word[word.size() - 2] != 's')
        return std::string(word.substr(0, word.size() - 1));
    return std::string(word);
}

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty() && !is_stopword(current))
            tokens.push_back(stem(current));
        current.clear();
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c))
            current.push_back(static_cast<char>(std::tolower(c)));
        else if (std::isspace(c))
            flush();
        // other punctuation is dropped without splitting ("mid-century" -> "midcentury")
    }
    flush();
    return tokens;
}

std::vector<double> item_vector(std::string_view text, const TokenLookup& lookup, std::size_t dim)
{
    std::vector<double> mean(dim, 0.0);
    std::size_t found = 0;
    for (const auto& token : tokenize(text)) {
        auto v = lookup(token);
        if (!v)
            continue;
        if (v->size() != dim)
            throw ShapeError("token '" + token + "' has a " + std::to_string(v->size()) + "-dim vector, expected " +
                             std::to_string(dim));
        for (std::size_t j = 0; j < dim; ++j)
            mean[j] += (*v)[j];
        ++found;
    }
    if (found == 0) {
        if (!text.empty())
            log::warn("no embeddable tokens in item text '" + std::string(text) + "'");
        return mean;
    }
    for (double& x : mean)
        x /= static_cast<double>(found);
    return mean;
}

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim)
{
    if (dim == 0)
        throw ConfigError("embedding dimension must be positive");
}

std::vector<double> HashingEmbedder::operator()(std::string_view token) const
{
    Rng rng(fnv1a64(token));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(dim_);
    double norm = 0.0;
    for (double& x : v) {
        x = normal(rng);
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v)
        x /= norm;
    return v;
}

TokenLookup HashingEmbedder::lookup() const
{
    return [self = *this](std::string_view token) -> std::optional<std::vector<double>> { return self(token); };
}

} // namespace scr::data
