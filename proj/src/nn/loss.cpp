#include "scr/nn/loss.hpp"

#include "scr/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace scr::nn {

namespace {

void require_same_shape(const Tensor2& a, const Tensor2& b, const char* what)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError(std::string(what) + ": shape " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
}

void require_distribution_rows(const Tensor2& probs)
{
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        double sum = 0.0;
        for (double p : probs.row(r)) {
            if (!(p >= 0.0))
                throw DomainError("multinomial_nll: negative or NaN probability in row " + std::to_string(r));
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw DomainError("multinomial_nll: row " + std::to_string(r) + " sums to " + std::to_string(sum));
    }
}

double clamp_prob(double p) { return std::clamp(p, bce_clamp, 1.0 - bce_clamp); }

} // namespace

GaussianParams::GaussianParams(Tensor2 mu_, Tensor2 log_var_) : mu(std::move(mu_)), log_var(std::move(log_var_))
{
    require_same_shape(mu, log_var, "GaussianParams");
}

double multinomial_nll(const Tensor2& targets, const Tensor2& probs)
{
    require_same_shape(targets, probs, "multinomial_nll");
    require_distribution_rows(probs);
    auto t = targets.values();
    auto p = probs.values();
    double loss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] != 0.0)
            loss -= t[i] * std::log(p[i] + multinomial_floor);
    return loss;
}

Tensor2 multinomial_nll_grad(const Tensor2& targets, const Tensor2& probs)
{
    require_same_shape(targets, probs, "multinomial_nll_grad");
    Tensor2 g(probs.rows(), probs.cols());
    auto t = targets.values();
    auto p = probs.values();
    auto gv = g.values();
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] != 0.0)
            gv[i] = -t[i] / (p[i] + multinomial_floor);
    return g;
}

double gaussian_kl(const GaussianParams& params)
{
    require_same_shape(params.mu, params.log_var, "gaussian_kl");
    auto mu = params.mu.values();
    auto lv = params.log_var.values();
    double kl = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (!std::isfinite(mu[i]) || !std::isfinite(lv[i]))
            throw DomainError("gaussian_kl: non-finite parameter at index " + std::to_string(i));
        kl += mu[i] * mu[i] + std::exp(lv[i]) - 1.0 - lv[i];
    }
    return 0.5 * kl;
}

GaussianParams gaussian_kl_grad(const GaussianParams& params)
{
    GaussianParams g{Tensor2(params.rows(), params.dim()), Tensor2(params.rows(), params.dim())};
    auto mu = params.mu.values();
    auto lv = params.log_var.values();
    auto gmu = g.mu.values();
    auto glv = g.log_var.values();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        gmu[i] = mu[i];
        glv[i] = 0.5 * (std::exp(lv[i]) - 1.0);
    }
    return g;
}

double multilabel_bce(const Tensor2& targets, const Tensor2& probs)
{
    require_same_shape(targets, probs, "multilabel_bce");
    auto t = targets.values();
    auto p = probs.values();
    double loss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double q = clamp_prob(p[i]);
        loss -= t[i] * std::log(q) + (1.0 - t[i]) * std::log(1.0 - q);
    }
    return loss;
}

Tensor2 multilabel_bce_grad(const Tensor2& targets, const Tensor2& probs)
{
    require_same_shape(targets, probs, "multilabel_bce_grad");
    Tensor2 g(probs.rows(), probs.cols());
    auto t = targets.values();
    auto p = probs.values();
    auto gv = g.values();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (p[i] <= bce_clamp || p[i] >= 1.0 - bce_clamp)
            continue;
        gv[i] = -t[i] / p[i] + (1.0 - t[i]) / (1.0 - p[i]);
    }
    return g;
}

} // namespace scr::nn
