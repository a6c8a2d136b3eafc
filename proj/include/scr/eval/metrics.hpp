#pragma once

#include "scr/nn/tensor.hpp"

#include <optional>
#include <span>
#include <vector>

namespace scr::eval {

// Ranking metrics take a ranked list of distinct items and the relevant set; an
// empty relevant set has no defined value (std::nullopt).

/// Binary-gain NDCG with a log2(rank + 1) discount, normalised by the ideal DCG.
std::optional<double> ndcg_at_k(std::span<const std::size_t> ranked, std::span<const std::size_t> relevant,
                                std::size_t k);

/// |top-k ∩ relevant| / min(k, |relevant|).
std::optional<double> recall_at_k(std::span<const std::size_t> ranked, std::span<const std::size_t> relevant,
                                  std::size_t k);

/// Rank-sum (Mann-Whitney) AUC with average ranks for ties; nullopt unless both classes occur.
std::optional<double> auc(std::span<const double> scores, std::span<const int> labels);

/// AUC of each column of `scores` against the matching binary column of `targets`.
std::vector<std::optional<double>> per_style_auc(const nn::Tensor2& scores, const nn::Tensor2& targets);

/// Mean over the defined entries; nullopt if none are.
std::optional<double> mean_defined(std::span<const std::optional<double>> values);

/// S × S Pearson correlation between columns; entries touching a zero-variance column are absent.
std::vector<std::vector<std::optional<double>>> pearson_matrix(const nn::Tensor2& profiles);

} // namespace scr::eval
