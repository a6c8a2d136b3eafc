#include "doctest.h"

#include "scr/core/rng.hpp"
#include "scr/eval/metrics.hpp"

#include <cmath>

using namespace scr;
using namespace scr::eval;
using nn::Tensor2;

namespace {

double all_pairs_auc(const std::vector<double>& s, const std::vector<int>& y)
{
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            if (y[i] == 1 && y[j] == 0) {
                pairs += 1.0;
                wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
    return wins / pairs;
}

} // namespace

TEST_CASE("ndcg_at_k worked values")
{
    std::vector<std::size_t> ranked{7, 3, 9, 1, 4};
    CHECK(ndcg_at_k(ranked, std::vector<std::size_t>{7}, 20) == 1.0);
    CHECK(*ndcg_at_k(ranked, std::vector<std::size_t>{9}, 20) == doctest::Approx(0.5));
    CHECK(ndcg_at_k(ranked, std::vector<std::size_t>{9}, 2) == 0.0);
    CHECK_FALSE(ndcg_at_k(ranked, std::vector<std::size_t>{}, 20).has_value());
    CHECK(ndcg_at_k(ranked, std::vector<std::size_t>{7, 3, 9}, 3) == 1.0);
}

TEST_CASE("recall_at_k worked values")
{
    std::vector<std::size_t> ranked{7, 3, 9, 1, 4};
    CHECK(recall_at_k(ranked, std::vector<std::size_t>{3, 4}, 20) == 1.0);
    CHECK(recall_at_k(ranked, std::vector<std::size_t>{3, 100, 101, 102}, 20) == 0.25);
    CHECK(recall_at_k(ranked, std::vector<std::size_t>{7, 3, 9, 1}, 2) == 1.0);
    CHECK_FALSE(recall_at_k(ranked, std::vector<std::size_t>{}, 20).has_value());
}

TEST_CASE("ranking metrics stay in [0,1] and the ideal ranking scores 1")
{
    Rng rng(12);
    for (int t = 0; t < 200; ++t) {
        std::vector<std::size_t> ranked(30);
        for (std::size_t i = 0; i < 30; ++i)
            ranked[i] = i;
        std::shuffle(ranked.begin(), ranked.end(), rng);
        std::vector<std::size_t> rel(ranked.begin(), ranked.begin() + 1 + static_cast<long>(rng() % 10));
        CHECK(ndcg_at_k(ranked, rel, 20) == 1.0);
        std::shuffle(ranked.begin(), ranked.end(), rng);
        const double n = *ndcg_at_k(ranked, rel, 20), r = *recall_at_k(ranked, rel, 20);
        CHECK((n >= 0.0 && n <= 1.0));
        CHECK((r >= 0.0 && r <= 1.0));
    }
}

TEST_CASE("auc worked values")
{
    CHECK(auc(std::vector<double>{0.9, 0.8, 0.3}, std::vector<int>{1, 0, 1}) == 0.5);
    CHECK(auc(std::vector<double>{0.9, 0.8, 0.3, 0.1}, std::vector<int>{1, 1, 0, 0}) == 1.0);
    CHECK(auc(std::vector<double>{0.4, 0.4, 0.4}, std::vector<int>{1, 0, 0}) == 0.5);
    CHECK_FALSE(auc(std::vector<double>{0.4, 0.1}, std::vector<int>{1, 1}).has_value());
}

TEST_CASE("auc equals the all-pairs oracle and is invariant to monotone transforms")
{
    Rng rng(99);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 2 + rng() % 99;
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng() % 20) / 20.0; // coarse grid forces ties
            y[i] = static_cast<int>(rng() % 2);
        }
        y[0] = 1;
        y[1] = 0;
        CHECK(*auc(s, y) == all_pairs_auc(s, y));
        std::vector<double> e(n);
        for (std::size_t i = 0; i < n; ++i)
            e[i] = std::exp(3.0 * s[i]) - 7.0;
        CHECK(*auc(e, y) == *auc(s, y));
    }
}

TEST_CASE("pearson_matrix worked values and shape")
{
    auto m = pearson_matrix(Tensor2{{1, 3, 1, 5}, {2, 2, 1, 5}, {3, 1, 2, 5}});
    CHECK(*m[0][0] == 1.0);
    CHECK(*m[0][1] == doctest::Approx(-1.0));
    CHECK(*m[0][2] == doctest::Approx(std::sqrt(3.0) / 2.0));
    CHECK_FALSE(m[0][3].has_value());
    CHECK_FALSE(m[3][3].has_value());

    Rng rng(3);
    std::normal_distribution<double> n;
    Tensor2 p(40, 5);
    for (double& v : p.values())
        v = n(rng);
    auto q = pearson_matrix(p);
    for (std::size_t a = 0; a < 5; ++a) {
        CHECK(std::abs(*q[a][a] - 1.0) <= 1e-9);
        for (std::size_t b = 0; b < 5; ++b)
            CHECK(*q[a][b] == *q[b][a]);
    }
}
