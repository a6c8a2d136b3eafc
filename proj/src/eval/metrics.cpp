#include "scr/eval/metrics.hpp"

#include "scr/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace scr::eval {

namespace {
double discount(std::size_t rank0) { return 1.0 / std::log2(static_cast<double>(rank0) + 2.0); }
} // namespace

std::optional<double> ndcg_at_k(std::span<const std::size_t> ranked, std::span<const std::size_t> relevant,
                                std::size_t k)
{
    if (relevant.empty())
        return std::nullopt;
    std::unordered_set<std::size_t> rel(relevant.begin(), relevant.end());
    double dcg = 0.0;
    for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r)
        if (rel.count(ranked[r]))
            dcg += discount(r);
    double idcg = 0.0;
    for (std::size_t r = 0; r < std::min(k, rel.size()); ++r)
        idcg += discount(r);
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

std::optional<double> recall_at_k(std::span<const std::size_t> ranked, std::span<const std::size_t> relevant,
                                  std::size_t k)
{
    if (relevant.empty())
        return std::nullopt;
    std::unordered_set<std::size_t> rel(relevant.begin(), relevant.end());
    std::size_t hits = 0;
    for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r)
        hits += rel.count(ranked[r]);
    const std::size_t denom = std::min(k, rel.size());
    return denom ? static_cast<double>(hits) / static_cast<double>(denom) : 0.0;
}

std::optional<double> auc(std::span<const double> scores, std::span<const int> labels)
{
    if (scores.size() != labels.size())
        throw ShapeError("auc: scores and labels differ in length");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average 1-based ranks over runs of equal scores.
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && scores[order[j]] == scores[order[i]])
            ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t)
            rank[order[t]] = avg;
        i = j;
    }
    double pos_rank_sum = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (labels[i]) {
            pos_rank_sum += rank[i];
            ++pos;
        }
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0)
        return std::nullopt;
    const double p = static_cast<double>(pos);
    return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

std::vector<std::optional<double>> per_style_auc(const nn::Tensor2& scores, const nn::Tensor2& targets)
{
    if (scores.rows() != targets.rows() || scores.cols() != targets.cols())
        throw ShapeError("per_style_auc: score and target shapes differ");
    std::vector<std::optional<double>> out;
    std::vector<double> col(scores.rows());
    std::vector<int> lab(scores.rows());
    for (std::size_t s = 0; s < scores.cols(); ++s) {
        for (std::size_t r = 0; r < scores.rows(); ++r) {
            col[r] = scores(r, s);
            lab[r] = targets(r, s) > 0.5 ? 1 : 0;
        }
        out.push_back(auc(col, lab));
    }
    return out;
}

std::optional<double> mean_defined(std::span<const std::optional<double>> values)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& v : values)
        if (v) {
            sum += *v;
            ++n;
        }
    if (n == 0)
        return std::nullopt;
    return sum / static_cast<double>(n);
}

std::vector<std::vector<std::optional<double>>> pearson_matrix(const nn::Tensor2& profiles)
{
    const std::size_t n = profiles.rows(), s = profiles.cols();
    std::vector<std::vector<std::optional<double>>> out(s, std::vector<std::optional<double>>(s));
    if (n < 2)
        return out;
    std::vector<double> mean(s, 0.0), sd(s, 0.0);
    for (std::size_t c = 0; c < s; ++c) {
        for (std::size_t r = 0; r < n; ++r)
            mean[c] += profiles(r, c);
        mean[c] /= static_cast<double>(n);
        for (std::size_t r = 0; r < n; ++r)
            sd[c] += (profiles(r, c) - mean[c]) * (profiles(r, c) - mean[c]);
        sd[c] = std::sqrt(sd[c]);
    }
    for (std::size_t a = 0; a < s; ++a) {
        if (sd[a] == 0.0)
            continue;
        out[a][a] = 1.0;
        for (std::size_t b = a + 1; b < s; ++b) {
            if (sd[b] == 0.0)
                continue;
            double cov = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                cov += (profiles(r, a) - mean[a]) * (profiles(r, b) - mean[b]);
            const double rho = std::clamp(cov / (sd[a] * sd[b]), -1.0, 1.0);
            out[a][b] = rho;
            out[b][a] = rho;
        }
    }
    return out;
}

} // namespace scr::eval
