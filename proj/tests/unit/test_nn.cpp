#include "doctest.h"

#include "scr/core/errors.hpp"
#include "scr/nn/adam.hpp"
#include "scr/nn/dropout.hpp"
#include "scr/nn/gradcheck.hpp"
#include "scr/nn/layer.hpp"
#include "scr/nn/loss.hpp"

#include <cmath>
#include <numeric>

using namespace scr;
using namespace scr::nn;

namespace {

Tensor2 random_tensor(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0)
{
    std::normal_distribution<double> n(0.0, scale);
    Tensor2 t(r, c);
    for (double& v : t.values())
        v = n(rng);
    return t;
}

} // namespace

TEST_CASE("forward: fixed points of the activations")
{
    DenseLayer zero(3, 2, Activation::identity);
    Tensor2 x{{1.0, -2.0, 3.0}, {0.5, 0.5, 0.5}};
    auto y = forward(zero, x);
    for (double v : y.values())
        CHECK(v == 0.0);

    DenseLayer sm(2, 4, Activation::softmax);
    auto p = forward(sm, Tensor2{{7.0, -1.0}});
    for (double v : p.values())
        CHECK(v == doctest::Approx(0.25));

    Tensor2 t{{0.0}};
    apply_activation(t, Activation::tanh);
    CHECK(t(0, 0) == 0.0);
    Tensor2 s{{0.0}};
    apply_activation(s, Activation::sigmoid);
    CHECK(s(0, 0) == 0.5);
}

TEST_CASE("forward: dimension mismatch is a shape error")
{
    DenseLayer layer(3, 2, Activation::tanh);
    CHECK_THROWS_AS(forward(layer, Tensor2(1, 4)), ShapeError);
}

TEST_CASE("softmax rows sum to one for extreme finite inputs")
{
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Tensor2 t = random_tensor(4, 17, rng, trial < 25 ? 1.0 : 300.0);
        apply_activation(t, Activation::softmax);
        for (std::size_t r = 0; r < t.rows(); ++r) {
            double s = std::accumulate(t.row(r).begin(), t.row(r).end(), 0.0);
            CHECK(std::abs(s - 1.0) < 1e-6);
        }
    }
}

TEST_CASE("multinomial_nll worked values")
{
    Tensor2 one_hot{{0, 0, 1, 0}};
    CHECK(multinomial_nll(one_hot, Tensor2{{0, 0, 1, 0}}) == doctest::Approx(0.0).epsilon(1e-9));
    Tensor2 uniform{{0.25, 0.25, 0.25, 0.25}};
    CHECK(multinomial_nll(one_hot, uniform) == doctest::Approx(1.3862943611198906));
    CHECK(multinomial_nll(Tensor2{{1, 0, 1, 0}}, uniform) == doctest::Approx(2 * 1.3862943611198906));
}

TEST_CASE("multinomial_nll rejects bad inputs")
{
    CHECK_THROWS_AS(multinomial_nll(Tensor2{{1, 0}}, Tensor2{{1, 0, 0}}), ShapeError);
    CHECK_THROWS_AS(multinomial_nll(Tensor2{{1, 0}}, Tensor2{{1.5, -0.5}}), DomainError);
    CHECK_THROWS_AS(multinomial_nll(Tensor2{{1, 0}}, Tensor2{{0.7, 0.7}}), DomainError);
}

TEST_CASE("gaussian_kl worked values")
{
    CHECK(gaussian_kl({Tensor2{{0.0, 0.0}}, Tensor2{{0.0, 0.0}}}) == 0.0);
    CHECK(gaussian_kl({Tensor2{{1.0, 0.0}}, Tensor2{{0.0, 0.0}}}) == doctest::Approx(0.5));
    CHECK(gaussian_kl({Tensor2{{0.0}}, Tensor2{{std::log(4.0)}}}) == doctest::Approx(0.8068528194400547));
    CHECK_THROWS_AS(gaussian_kl({Tensor2{{NAN}}, Tensor2{{0.0}}}), DomainError);
}

TEST_CASE("gaussian_kl is non-negative on random inputs")
{
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        GaussianParams p{random_tensor(3, 5, rng, 2.0), random_tensor(3, 5, rng, 2.0)};
        CHECK(gaussian_kl(p) >= 0.0);
    }
}

TEST_CASE("multilabel_bce worked values")
{
    CHECK(multilabel_bce(Tensor2{{1.0}}, Tensor2{{1.0}}) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(multilabel_bce(Tensor2{{1.0}}, Tensor2{{0.5}}) == doctest::Approx(0.6931471805599453));
    CHECK(multilabel_bce(Tensor2{{1.0, 0.0}}, Tensor2{{0.5, 0.5}}) == doctest::Approx(2 * 0.6931471805599453));
    CHECK_THROWS_AS(multilabel_bce(Tensor2{{1.0}}, Tensor2{{0.5, 0.5}}), ShapeError);
}

TEST_CASE("losses are additive over independent entries")
{
    Tensor2 t1{{1, 0, 0}}, p1{{0.2, 0.3, 0.5}};
    Tensor2 t2{{0, 1, 1}}, p2{{0.6, 0.3, 0.1}};
    Tensor2 t12{{1, 0, 0}, {0, 1, 1}}, p12{{0.2, 0.3, 0.5}, {0.6, 0.3, 0.1}};
    CHECK(multinomial_nll(t12, p12) == doctest::Approx(multinomial_nll(t1, p1) + multinomial_nll(t2, p2)));
    CHECK(multilabel_bce(t12, p12) == doctest::Approx(multilabel_bce(t1, p1) + multilabel_bce(t2, p2)));
}

TEST_CASE("adam_step: zero gradient leaves parameters unchanged")
{
    std::vector<double> params{1.0, -2.0, 3.5};
    const auto before = params;
    AdamState state(params.size(), {});
    std::vector<double> zeros(3, 0.0);
    for (int i = 0; i < 10; ++i)
        adam_step(state, params, zeros);
    CHECK(params == before);
    CHECK(state.step == 10);
}

TEST_CASE("adam_step: first step moves by lr in the direction of -sign(g)")
{
    for (double g : {3.0, -0.02}) {
        std::vector<double> x{0.0};
        AdamState state(1, {.learning_rate = 0.1});
        std::vector<double> grad{g};
        adam_step(state, x, grad);
        CHECK(x[0] == doctest::Approx(g > 0 ? -0.1 : 0.1).epsilon(1e-6));
    }
}

TEST_CASE("adam_step converges on x^2")
{
    std::vector<double> x{1.0};
    AdamState state(1, {.learning_rate = 0.1});
    for (int i = 0; i < 500; ++i) {
        std::vector<double> g{2.0 * x[0]};
        adam_step(state, x, g);
    }
    CHECK(std::abs(x[0]) < 1e-3);
}

TEST_CASE("adam_step aborts on non-finite gradient")
{
    std::vector<double> x{1.0};
    AdamState state(1, {});
    std::vector<double> g{NAN};
    CHECK_THROWS_AS(adam_step(state, x, g), NumericError);
    CHECK(x[0] == 1.0);
}

TEST_CASE("grad_check on a linear loss is exact")
{
    const std::vector<double> xs{0.5, -1.5, 2.0};
    ScalarLoss loss = [&](std::span<const double> w) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            s += w[i] * xs[i];
        return s;
    };
    std::vector<double> w{1.0, 2.0, 3.0};
    auto report = grad_check(loss, w, xs, 1e-4);
    CHECK(report.passed);
    CHECK(report.max_relative_error < 1e-9);

    std::vector<double> wrong{0.5, -1.5, 2.1};
    CHECK_FALSE(grad_check(loss, w, wrong, 1e-4).passed);
}

TEST_CASE("backward through every activation matches finite differences")
{
    Rng rng(3);
    for (auto act : {Activation::identity, Activation::tanh, Activation::relu, Activation::sigmoid,
                     Activation::softmax}) {
        CAPTURE(to_string(act));
        DenseLayer hidden = DenseLayer::glorot(4, 5, act, rng);
        DenseLayer head = DenseLayer::glorot(5, 3, Activation::softmax, rng);
        Tensor2 x = random_tensor(3, 4, rng);
        Tensor2 targets{{1, 0, 0}, {0, 1, 1}, {0, 0, 1}};

        std::vector<ParamRef> params;
        append_params(params, "hidden", hidden);
        append_params(params, "head", head);

        auto eval_loss = [&] {
            Tensor2 h = forward(hidden, x);
            Tensor2 p = forward(head, h);
            return multinomial_nll(targets, p);
        };
        DenseGrads gh(hidden), gp(head);
        Tensor2 h = forward(hidden, x);
        Tensor2 p = forward(head, h);
        Tensor2 dh = backward(head, h, p, multinomial_nll_grad(targets, p), gp);
        backward(hidden, x, h, dh, gh, false);

        std::vector<std::span<const double>> grads;
        append_grads(grads, gh);
        append_grads(grads, gp);
        std::vector<double> analytic;
        for (auto g : grads)
            analytic.insert(analytic.end(), g.begin(), g.end());

        const auto start = flatten(params);
        ScalarLoss loss = [&](std::span<const double> flat) {
            unflatten(flat, params);
            return eval_loss();
        };
        auto report = grad_check(loss, start, analytic, 1e-4);
        unflatten(start, params);
        CHECK(report.passed);
    }
}

TEST_CASE("dropout_mask")
{
    Rng rng(5);
    auto ones = dropout_mask(10, 10, 0.0, rng);
    for (double v : ones.values())
        CHECK(v == 1.0);

    auto mask = dropout_mask(100, 100, 0.5, rng);
    std::size_t kept = 0;
    for (double v : mask.values()) {
        CHECK((v == 0.0 || v == 2.0));
        kept += v != 0.0;
    }
    CHECK(std::abs(static_cast<double>(kept) / 10000.0 - 0.5) <= 0.02);

    Tensor2 x{{1.0, 2.0, 3.0}};
    CHECK(dropout(x, 0.9, rng, false) == x);
    CHECK_THROWS_AS(dropout_mask(1, 1, 1.0, rng), ConfigError);
}

TEST_CASE("parameter_hash tracks single-bit changes")
{
    DenseLayer layer(2, 2, Activation::tanh);
    std::vector<ParamRef> params;
    append_params(params, "l", layer);
    auto h0 = parameter_hash(params);
    layer.weights(1, 1) = 1e-300;
    CHECK(parameter_hash(params) != h0);
}
