#include "doctest.h"

#include "trained_fixture.hpp"

#include "scr/core/errors.hpp"
#include "scr/eval/metrics.hpp"
#include "scr/eval/reports.hpp"

#include <sstream>

using namespace scr;
using namespace scr::eval;

TEST_CASE("style_distribution_report")
{
    data::LabeledProfileDataset one;
    one.vectors = nn::Tensor2(1, 2);
    one.profiles = nn::Tensor2{{0, 1, 0}};
    CHECK(style_distribution_report(one) == std::vector<double>{0, 1, 0});

    const auto& f = trained_fixture();
    Rng rng(4);
    auto ds = data::build_labelprop_dataset(f.split.train, f.synth.labels, f.synth.embeddings, {}, rng);
    double total = 0.0;
    for (double p : style_distribution_report(ds)) {
        CHECK((p >= 0.0 && p <= 1.0));
        total += p;
    }
    CHECK(total >= 1.0);
    CHECK_THROWS_AS(style_distribution_report(data::LabeledProfileDataset{}), DataError);
}

TEST_CASE("variance_vs_k_study shrinks with k")
{
    const auto& f = trained_fixture();
    Rng rng(8);
    const std::vector<std::size_t> ks{1, 2, 5, 10, 0};
    const auto v = variance_vs_k_study(f.synth.embeddings, f.synth.clicks, ks, rng);
    REQUIRE(v.size() == ks.size());
    for (std::size_t i = 1; i < v.size(); ++i)
        CHECK(v[i] <= v[i - 1] * 1.05);
    CHECK(*std::max_element(v.begin(), v.end()) == v.front());
    CHECK(*std::min_element(v.begin(), v.end()) == v.back());
}

TEST_CASE("evaluate_ranking and its TSV output")
{
    const auto& f = trained_fixture();
    auto scr = evaluate_ranking("scr", f.conditioned, &f.text, f.split, f.synth.embeddings, {});
    auto base = evaluate_ranking("vae-cf", f.unconditioned, nullptr, f.split, f.synth.embeddings, {});
    CHECK(scr.users.size() + scr.skipped == f.split.heldout_users.size());
    for (const auto& u : scr.users) {
        CHECK((u.ndcg20 >= 0.0 && u.ndcg20 <= 1.0));
        CHECK((u.recall50 >= 0.0 && u.recall50 <= 1.0));
    }
    CHECK(scr.ndcg20 > 0.0);

    const ReportStamp stamp{42, "00ff"};
    std::ostringstream per_user, summary;
    write_ranking_tsv(per_user, stamp, scr, f.synth.clicks.user_ids());
    write_ranking_summary(summary, stamp, {scr, base});
    CHECK(per_user.str().rfind("# manifest 00ff seed 42\n", 0) == 0);
    CHECK(summary.str().find("scr-vs-vae-cf\tndcg@20\t") != std::string::npos);
}

TEST_CASE("style and shift TSVs carry headers from the vocabulary")
{
    StyleReport r;
    r.style_names = {"a", "b"};
    r.encoder = {r.style_names, {0.9, std::nullopt}, 0.9};
    r.prevalence = {0.5, 0.25};
    r.correlation = pearson_matrix(nn::Tensor2{{1, 0}, {0, 1}, {1, 1}});
    std::ostringstream out;
    write_style_tsv(out, {1, "ab"}, r);
    CHECK(out.str().find("b\t0.25\tNA\tNA\n") != std::string::npos);
    CHECK(out.str().find("pearson\ta\tb\n") != std::string::npos);

    inject::InjectionShift s;
    s.style_names = {"a", "b"};
    s.users = 3;
    s.shift = nn::Tensor2{{0.5, -0.1}, {-0.2, 0.4}};
    s.injected_presence = {0.9, 0.8};
    s.identity_presence = {0.3, 0.4};
    s.rank_overlap = {0.1, 0.2};
    std::ostringstream shift;
    write_shift_tsv(shift, {1, "ab"}, s);
    CHECK(shift.str().find("injected\ta\tb\na\t0.5\t-0.1\n") != std::string::npos);
    CHECK(s.relative_increase(0) == doctest::Approx(2.0));
    CHECK(s.mean_relative_increase() == doctest::Approx(1.5));
}
