#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scr::data {

/// Word-vector lookup; std::nullopt for out-of-vocabulary tokens.
using TokenLookup = std::function<std::optional<std::vector<double>>(std::string_view)>;

/// Lowercases, strips punctuation, drops stopwords and strips a trailing "ing", "ed" or "s".
std::vector<std::string> tokenize(std::string_view text);

std::string stem(std::string_view word);

bool is_stopword(std::string_view word);

/// Mean of the vectors of the tokens found by `lookup`; zero vector (with a warning) if none are.
std::vector<double> item_vector(std::string_view text, const TokenLookup& lookup, std::size_t dim);

/**
 * Deterministic stand-in for a trained word2vec table. A token's 64-bit FNV-1a
 * hash seeds a Gaussian draw of `dim` values, normalised to unit length.
 */
class HashingEmbedder {
public:
    explicit HashingEmbedder(std::size_t dim);

    std::vector<double> operator()(std::string_view token) const;
    TokenLookup lookup() const;
    std::size_t dim() const noexcept { return dim_; }

private:
    std::size_t dim_;
};

} // namespace scr::data
