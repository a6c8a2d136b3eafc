#include "doctest.h"

#include "trained_fixture.hpp"

#include "scr/core/errors.hpp"
#include "scr/io/model_files.hpp"
#include "scr/nn/dropout.hpp"
#include "scr/nn/gradcheck.hpp"
#include "scr/vae/click_vae.hpp"
#include "scr/vae/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

using namespace scr;
using namespace scr::vae;
using nn::Tensor2;

namespace {

Tensor2 random_tensor(std::size_t r, std::size_t c, Rng& rng)
{
    std::normal_distribution<double> n;
    Tensor2 t(r, c);
    for (double& v : t.values())
        v = n(rng);
    return t;
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("scr_vae_" + std::to_string(getpid()) + "_" + name);
}

std::vector<double> flat_grads(const ClickVaeGrads& g)
{
    std::vector<double> out;
    for (auto s : g.spans())
        out.insert(out.end(), s.begin(), s.end());
    return out;
}

data::ItemEmbeddingTable one_hot_embeddings(std::size_t items, std::size_t dim)
{
    std::vector<std::string> ids;
    Tensor2 v(items, dim);
    for (std::size_t i = 0; i < items; ++i) {
        ids.push_back("i" + std::to_string(i));
        v(i, i % dim) = 1.0;
    }
    return data::ItemEmbeddingTable(ids, v);
}

} // namespace

TEST_CASE("zero-weight click VAE: standard posterior and uniform decoder")
{
    ClickVaeModel m({.items = 6, .styles = 2, .hidden = 4, .latent = 3}, {"a", "b"});
    const std::vector<std::vector<std::size_t>> rows{{0, 2}, {5}};
    const Tensor2 x = normalized_clicks(rows, 6);
    const Tensor2 cond{{0.3, 0.9}, {0.0, 0.0}};
    auto q = encode_clicks(m, x, cond);
    for (double v : q.mu.values())
        CHECK(v == 0.0);
    for (double v : q.log_var.values())
        CHECK(v == 0.0);
    auto p = decode_clicks(m, q.mu, cond);
    for (double v : p.values())
        CHECK(v == doctest::Approx(1.0 / 6.0));
    CHECK_THROWS_AS(encode_clicks(m, x, Tensor2(2, 3)), ShapeError);
    CHECK_THROWS_AS(decode_clicks(m, Tensor2(2, 4), cond), ShapeError);
}

TEST_CASE("normalized_clicks rows have unit norm")
{
    const std::vector<std::vector<std::size_t>> rows{{0, 1, 3, 4}, {}, {2}};
    const Tensor2 x = normalized_clicks(rows, 5);
    CHECK(x(0, 0) == 0.5);
    CHECK(x(0, 2) == 0.0);
    CHECK(x(2, 2) == 1.0);
    for (double v : x.row(1))
        CHECK(v == 0.0);
}

TEST_CASE("encode_clicks is deterministic; the zero condition is a valid input")
{
    Rng rng(3);
    auto m = ClickVaeModel::initialized({.items = 10, .styles = 2, .hidden = 8, .latent = 4}, {"a", "b"}, rng);
    const std::vector<std::vector<std::size_t>> rows{{1, 4, 7}};
    const Tensor2 x = normalized_clicks(rows, 10);
    const Tensor2 cond{{0.7, 0.1}};
    auto a = encode_clicks(m, x, cond), b = encode_clicks(m, x, cond);
    CHECK(a.mu == b.mu);
    CHECK(a.log_var == b.log_var);
    auto z = encode_clicks(m, x, Tensor2(1, 2));
    CHECK(z.mu.all_finite());
    CHECK(z.mu != a.mu);
}

TEST_CASE("reparameterize")
{
    nn::GaussianParams p{Tensor2{{1.5, -0.5}}, Tensor2{{0.3, -2.0}}};
    CHECK(reparameterize(p, Tensor2(1, 2)) == p.mu);
    nn::GaussianParams q{Tensor2{{0.0}}, Tensor2{{std::log(4.0)}}};
    CHECK(reparameterize(q, Tensor2{{1.0}})(0, 0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(reparameterize(p, Tensor2(1, 3)), ShapeError);

    Rng rng(17);
    nn::GaussianParams s{Tensor2(10000, 1), Tensor2(10000, 1)};
    const Tensor2 z = reparameterize(s, random_tensor(10000, 1, rng));
    double mean = 0.0, var = 0.0;
    for (double v : z.values())
        mean += v;
    mean /= 10000.0;
    for (double v : z.values())
        var += (v - mean) * (v - mean);
    var /= 10000.0;
    CHECK(std::abs(mean) <= 0.05);
    CHECK(std::abs(var - 1.0) <= 0.05);
}

TEST_CASE("cvae_loss")
{
    const Tensor2 t{{0, 1, 0}};
    const Tensor2 p{{0.2, 0.5, 0.3}};
    nn::GaussianParams q{Tensor2{{1.0, 0.0}}, Tensor2{{0.0, 0.0}}};
    CHECK(cvae_loss(t, p, q, 0.0) == doctest::Approx(std::log(2.0)));
    CHECK(cvae_loss(t, p, q, 0.17) == doctest::Approx(std::log(2.0) + 0.17 * 0.5));
    CHECK(cvae_loss(t, Tensor2{{0, 1, 0}}, {Tensor2(1, 2), Tensor2(1, 2)}, 0.17) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(VaeTrainConfig{}.beta == 0.17);
    CHECK(VaeTrainConfig{}.epochs == 60);
    CHECK_THROWS_AS(cvae_loss(t, p, q, -1.0), ConfigError);
}

TEST_CASE("cvae_batch_loss gradient matches finite differences")
{
    for (std::size_t styles : {std::size_t{2}, std::size_t{0}}) {
        for (bool with_mask : {false, true}) {
            CAPTURE(styles);
            CAPTURE(with_mask);
            Rng rng(29);
            std::vector<std::string> names;
            for (std::size_t s = 0; s < styles; ++s)
                names.push_back("s" + std::to_string(s));
            auto m = ClickVaeModel::initialized({.items = 10, .styles = styles, .hidden = 6, .latent = 3}, names, rng);
            const std::vector<std::vector<std::size_t>> rows{{0, 3, 4}, {9}, {1, 2, 5, 8}};
            const Tensor2 targets = binary_clicks(rows, 10);
            Tensor2 cond(3, styles);
            std::uniform_real_distribution<double> u;
            for (double& v : cond.values())
                v = u(rng);
            const Tensor2 eps = random_tensor(3, 3, rng);
            const Tensor2 mask = nn::dropout_mask(3, 3, 0.3, rng);
            const Tensor2* mp = with_mask ? &mask : nullptr;

            ClickVaeGrads g(m);
            cvae_batch_loss(m, targets, cond, &eps, mp, 0.17, &g);
            const auto analytic = flat_grads(g);
            auto params = m.parameters();
            const auto start = nn::flatten(params);
            nn::ScalarLoss loss = [&](std::span<const double> flat) {
                nn::unflatten(flat, params);
                return cvae_batch_loss(m, targets, cond, &eps, mp, 0.17, nullptr).loss;
            };
            auto report = nn::grad_check(loss, start, analytic, 1e-4);
            nn::unflatten(start, params);
            CHECK(report.max_relative_error < 1e-4);
        }
    }
}

TEST_CASE("train_click_vae memorises five users")
{
    const std::vector<std::vector<std::size_t>> rows{{0, 1, 2}, {3, 4}, {5, 6, 7, 8}, {9, 10}, {11, 0, 4}};
    data::ClickMatrix clicks({"u1", "u2", "u3", "u4", "u5"},
                             {"i0", "i1", "i2", "i3", "i4", "i5", "i6", "i7", "i8", "i9", "i10", "i11"}, rows);
    const auto emb = one_hot_embeddings(12, 4);
    Rng rng(6);
    auto text = textenc::TextEncoderModel::initialized({.input_dim = 4, .hidden1 = 8, .hidden2 = 8, .styles = 2},
                                                       {"a", "b"}, rng);
    for (std::size_t styles : {std::size_t{0}, std::size_t{2}}) {
        CAPTURE(styles);
        std::vector<std::string> names = styles ? std::vector<std::string>{"a", "b"} : std::vector<std::string>{};
        auto m = ClickVaeModel::initialized(
            {.items = 12, .styles = styles, .hidden = 32, .latent = 8, .decoder_dropout = 0.0}, names, rng);
        auto report = train_click_vae(m, clicks, styles ? &text : nullptr, emb,
                                      {.beta = 0.0, .epochs = 1500, .batch_size = 5, .adam = {.learning_rate = 1e-2}},
                                      rng);
        CHECK(report.curve.tail_mean() < report.curve.head_mean());
        for (std::size_t u = 0; u < 5; ++u) {
            const auto profile = learned_profile(styles ? &text : nullptr, rows[u], emb, {});
            const auto scores = score_items(m, rows[u], profile, profile);
            auto top = rank_items(scores, {}, rows[u].size());
            std::sort(top.begin(), top.end());
            auto want = rows[u];
            std::sort(want.begin(), want.end());
            CHECK(top == want);
        }
    }
}

TEST_CASE("train_click_vae keeps the text encoder frozen and records invariants")
{
    const auto& f = trained_fixture();
    const auto& r = f.conditioned_report;
    CHECK(r.text_hash_before != 0);
    CHECK(r.text_hash_before == r.text_hash_after);
    CHECK(r.text_hash_after == text_encoder_hash(f.text));
    CHECK(r.min_kl >= 0.0);
    CHECK(r.max_row_sum_error <= 1e-6);
    CHECK(r.curve.tail_mean() < r.curve.head_mean());
    CHECK(r.steps == 60 * ((700 + 49) / 50));
}

TEST_CASE("train_click_vae rejects mismatched inputs")
{
    const auto& f = trained_fixture();
    Rng rng(1);
    auto m = ClickVaeModel::initialized({.items = 200, .styles = 4, .hidden = 8, .latent = 2}, f.text.style_names, rng);
    CHECK_THROWS_AS(train_click_vae(m, f.split.train, nullptr, f.synth.embeddings, {.epochs = 1}, rng), ConfigError);
    auto wrong = ClickVaeModel::initialized({.items = 199, .hidden = 8, .latent = 2}, {}, rng);
    CHECK_THROWS_AS(train_click_vae(wrong, f.split.train, nullptr, f.synth.embeddings, {.epochs = 1}, rng),
                    ShapeError);
}

TEST_CASE("recommend: exclusion, completeness, ties and determinism")
{
    const auto& f = trained_fixture();
    const auto& fold = f.split.fold_in[0];
    auto all = recommend(f.conditioned, &f.text, fold, f.synth.embeddings, 1000, {});
    CHECK(all.size() == 200 - fold.size());
    std::set<std::size_t> seen(all.begin(), all.end());
    CHECK(seen.size() == all.size());
    for (std::size_t i : fold)
        CHECK(seen.count(i) == 0);

    auto again = recommend(f.conditioned, &f.text, fold, f.synth.embeddings, 20, {});
    CHECK(again == std::vector<std::size_t>(all.begin(), all.begin() + 20));
    CHECK_THROWS_AS(recommend(f.conditioned, &f.text, {}, f.synth.embeddings, 20, {}), DataError);

    const std::vector<double> tied{0.1, 0.3, 0.3, 0.05, 0.3};
    CHECK(rank_items(tied, std::vector<std::size_t>{2}, 10) == std::vector<std::size_t>{1, 4, 0, 3});
}

TEST_CASE("recommend: the condition changes rankings and favours the planted style")
{
    const auto& f = trained_fixture();
    const std::size_t styles = 4, items = 200;
    std::vector<double> share(styles, 0.0);
    for (std::size_t i = 0; i < items; ++i)
        share[f.synth.primary_style[i]] += 1.0 / items;

    std::size_t differing = 0, favoured = 0, considered = 0;
    for (std::size_t h = 0; h < f.split.heldout_users.size(); ++h) {
        const std::size_t user = f.split.heldout_users[h];
        const auto& fold = f.split.fold_in[h];
        const auto profile = learned_profile(&f.text, fold, f.synth.embeddings, {});
        const auto probs = score_items(f.conditioned, fold, profile, profile);
        const auto cond = rank_items(probs, fold, 20);
        const auto plain = recommend(f.unconditioned, nullptr, fold, f.synth.embeddings, 20, {});
        differing += cond != plain;
        if (f.synth.dominant[user].size() != 1)
            continue;
        const std::size_t s = f.synth.dominant[user][0];
        double mass = 0.0;
        for (std::size_t i = 0; i < items; ++i)
            if (f.synth.primary_style[i] == s)
                mass += probs[i];
        ++considered;
        favoured += mass > share[s];
    }
    CHECK(differing > f.split.heldout_users.size() / 2);
    REQUIRE(considered > 0);
    CHECK(favoured == considered);
}

TEST_CASE("last-k profiles use the most recent clicks")
{
    const auto& f = trained_fixture();
    const auto& fold = f.split.fold_in[1];
    REQUIRE(fold.size() > 5);
    const ProfileSpec last{.mode = ProfileMode::last_k, .k = 5};
    const std::vector<std::size_t> tail(fold.end() - 5, fold.end());
    CHECK(learned_profile(&f.text, fold, f.synth.embeddings, last) ==
          learned_profile(&f.text, tail, f.synth.embeddings, last));
    CHECK(profile_mode_from_string("last-k") == ProfileMode::last_k);
    CHECK_THROWS_AS(profile_mode_from_string("first"), ConfigError);
}

TEST_CASE("checkpoints round-trip bit-identically")
{
    const auto& f = trained_fixture();
    const auto te_path = temp_path("text.ckpt"), vae_path = temp_path("vae.ckpt");
    io::save_text_encoder(te_path, f.text, "abc123");
    io::save_click_vae(vae_path, f.conditioned, "abc123");
    const auto te = io::load_text_encoder(te_path, "abc123");
    const auto vm = io::load_click_vae(vae_path);
    CHECK(te.layer1 == f.text.layer1);
    CHECK(te.head == f.text.head);
    CHECK(te.style_names == f.text.style_names);
    CHECK(vm.dec_head == f.conditioned.dec_head);
    for (std::size_t h = 0; h < 10; ++h) {
        const auto& fold = f.split.fold_in[h];
        CHECK(recommend(vm, &te, fold, f.synth.embeddings, 20, {}) ==
              recommend(f.conditioned, &f.text, fold, f.synth.embeddings, 20, {}));
    }
    CHECK_THROWS_AS(io::load_text_encoder(te_path, "other"), DataError);
    CHECK_THROWS_AS(io::load_click_vae(te_path), DataError);

    std::ifstream in(te_path);
    std::string first;
    std::getline(in, first);
    CHECK(first == "SCR-CKPT v1");
    std::filesystem::remove(te_path);
    std::filesystem::remove(vae_path);
}

TEST_CASE("checkpoint text format: encoding and malformed input")
{
    CHECK(io::percent_decode(io::percent_encode("Mid-Century Modern, 50% off=x")) == "Mid-Century Modern, 50% off=x");
    CHECK(io::decode_list(io::encode_list({"a b", "c,d", "e"})) == std::vector<std::string>{"a b", "c,d", "e"});

    std::istringstream bad_magic("SCR-CKPT v2\nkind=x\n");
    CHECK_THROWS_AS(io::read_checkpoint(bad_magic, "mem"), DataError);
    std::istringstream truncated("SCR-CKPT v1\nkind=x\nw 2 2\n1 2\n");
    CHECK_THROWS_AS(io::read_checkpoint(truncated, "mem"), DataError);
    std::istringstream short_row("SCR-CKPT v1\nkind=x\nw 1 2\n1\n");
    CHECK_THROWS_AS(io::read_checkpoint(short_row, "mem"), DataError);
    std::istringstream ok("SCR-CKPT v1\nkind=x n=3\nw 1 2\n0.1 -2e-300\n");
    auto ck = io::read_checkpoint(ok, "mem");
    CHECK(ck.require_count("n") == 3);
    CHECK(ck.tensors[0].values[1] == -2e-300);
}
