#include "scr/vae/click_vae.hpp"

#include "scr/core/errors.hpp"
#include "scr/core/log.hpp"
#include "scr/data/sampling.hpp"
#include "scr/nn/dropout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scr::vae {

using nn::Activation;
using nn::DenseLayer;
using nn::Tensor2;

namespace {

void validate(const ClickVaeShape& s, std::size_t names)
{
    if (s.items == 0 || s.hidden == 0 || s.latent == 0)
        throw ConfigError("click VAE dimensions must be positive");
    if (names != s.styles)
        throw ConfigError("click VAE: " + std::to_string(names) + " style names for " + std::to_string(s.styles) +
                          " styles");
    if (!(s.decoder_dropout >= 0.0 && s.decoder_dropout < 1.0))
        throw ConfigError("click VAE decoder dropout must be in [0, 1)");
}

void check_profiles(const ClickVaeModel& m, const Tensor2& profiles, std::size_t rows)
{
    if (profiles.rows() != rows || profiles.cols() != m.styles())
        throw ShapeError("click VAE expects a " + std::to_string(rows) + " x " + std::to_string(m.styles()) +
                         " condition, got " + std::to_string(profiles.rows()) + " x " +
                         std::to_string(profiles.cols()));
}

struct Pass {
    Tensor2 enc_in;
    Tensor2 enc_h;
    Tensor2 enc_out;
    nn::GaussianParams params;
    Tensor2 z;
    Tensor2 dec_in;
    Tensor2 dec_h;
    Tensor2 probs;
};

Pass run(const ClickVaeModel& m, const Tensor2& normalized, const Tensor2& profiles, const Tensor2* eps,
         const Tensor2* mask)
{
    if (normalized.cols() != m.items())
        throw ShapeError("click VAE expects " + std::to_string(m.items()) + " item columns, got " +
                         std::to_string(normalized.cols()));
    check_profiles(m, profiles, normalized.rows());
    Pass p;
    p.enc_in = m.conditioned() ? nn::hconcat(normalized, profiles) : normalized;
    p.enc_h = nn::forward(m.enc_hidden, p.enc_in);
    p.enc_out = nn::forward(m.enc_head, p.enc_h);
    p.params = {nn::column_slice(p.enc_out, 0, m.latent()), nn::column_slice(p.enc_out, m.latent(), m.latent())};
    p.z = eps ? reparameterize(p.params, *eps) : p.params.mu;
    Tensor2 z_in = p.z;
    if (mask)
        nn::apply_mask(z_in, *mask);
    p.dec_in = m.conditioned() ? nn::hconcat(z_in, profiles) : std::move(z_in);
    p.dec_h = nn::forward(m.dec_hidden, p.dec_in);
    p.probs = nn::forward(m.dec_head, p.dec_h);
    return p;
}

Tensor2 click_rows(std::span<const std::vector<std::size_t>> rows, std::size_t items, bool normalize)
{
    Tensor2 out(rows.size(), items);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t i : rows[r]) {
            if (i >= items)
                throw ShapeError("click index " + std::to_string(i) + " outside a catalog of " +
                                 std::to_string(items));
            out(r, i) = 1.0;
        }
        if (!normalize)
            continue;
        double n = 0.0;
        for (double v : out.row(r))
            n += v;
        if (n > 0.0)
            for (double& v : out.row(r))
                v /= std::sqrt(n);
    }
    return out;
}

} // namespace

ClickVaeModel::ClickVaeModel(ClickVaeShape s, std::vector<std::string> names) : shape(s), style_names(std::move(names))
{
    validate(shape, style_names.size());
    enc_hidden = DenseLayer(shape.items + shape.styles, shape.hidden, Activation::tanh);
    enc_head = DenseLayer(shape.hidden, 2 * shape.latent, Activation::identity);
    dec_hidden = DenseLayer(shape.latent + shape.styles, shape.hidden, Activation::tanh);
    dec_head = DenseLayer(shape.hidden, shape.items, Activation::softmax);
}

ClickVaeModel ClickVaeModel::initialized(ClickVaeShape s, std::vector<std::string> names, Rng& rng)
{
    ClickVaeModel m(s, std::move(names));
    m.enc_hidden = DenseLayer::glorot(s.items + s.styles, s.hidden, Activation::tanh, rng);
    m.enc_head = DenseLayer::glorot(s.hidden, 2 * s.latent, Activation::identity, rng);
    m.dec_hidden = DenseLayer::glorot(s.latent + s.styles, s.hidden, Activation::tanh, rng);
    m.dec_head = DenseLayer::glorot(s.hidden, s.items, Activation::softmax, rng);
    return m;
}

std::vector<nn::ParamRef> ClickVaeModel::parameters()
{
    std::vector<nn::ParamRef> out;
    nn::append_params(out, "vae.enc_hidden", enc_hidden);
    nn::append_params(out, "vae.enc_head", enc_head);
    nn::append_params(out, "vae.dec_hidden", dec_hidden);
    nn::append_params(out, "vae.dec_head", dec_head);
    return out;
}

Tensor2 normalized_clicks(std::span<const std::vector<std::size_t>> rows, std::size_t items)
{
    return click_rows(rows, items, true);
}

Tensor2 binary_clicks(std::span<const std::vector<std::size_t>> rows, std::size_t items)
{
    return click_rows(rows, items, false);
}

nn::GaussianParams encode_clicks(const ClickVaeModel& model, const Tensor2& normalized, const Tensor2& profiles)
{
    if (normalized.cols() != model.items())
        throw ShapeError("click VAE expects " + std::to_string(model.items()) + " item columns, got " +
                         std::to_string(normalized.cols()));
    check_profiles(model, profiles, normalized.rows());
    const Tensor2 in = model.conditioned() ? nn::hconcat(normalized, profiles) : normalized;
    const Tensor2 out = nn::forward(model.enc_head, nn::forward(model.enc_hidden, in));
    return {nn::column_slice(out, 0, model.latent()), nn::column_slice(out, model.latent(), model.latent())};
}

Tensor2 reparameterize(const nn::GaussianParams& params, const Tensor2& epsilon)
{
    if (epsilon.rows() != params.rows() || epsilon.cols() != params.dim())
        throw ShapeError("reparameterize: epsilon shape differs from the Gaussian parameters");
    Tensor2 z = params.mu;
    auto zv = z.values();
    auto lv = params.log_var.values();
    auto ev = epsilon.values();
    for (std::size_t i = 0; i < zv.size(); ++i)
        zv[i] += std::exp(0.5 * lv[i]) * ev[i];
    return z;
}

Tensor2 decode_clicks(const ClickVaeModel& model, const Tensor2& z, const Tensor2& profiles)
{
    if (z.cols() != model.latent())
        throw ShapeError("click VAE decoder expects " + std::to_string(model.latent()) + " latent columns, got " +
                         std::to_string(z.cols()));
    check_profiles(model, profiles, z.rows());
    const Tensor2 in = model.conditioned() ? nn::hconcat(z, profiles) : z;
    return nn::forward(model.dec_head, nn::forward(model.dec_hidden, in));
}

double cvae_loss(const Tensor2& targets, const Tensor2& probs, const nn::GaussianParams& params, double beta)
{
    if (beta < 0.0)
        throw ConfigError("beta must be non-negative");
    return nn::multinomial_nll(targets, probs) + beta * nn::gaussian_kl(params);
}

ClickVaeGrads::ClickVaeGrads(const ClickVaeModel& m)
    : enc_hidden(m.enc_hidden), enc_head(m.enc_head), dec_hidden(m.dec_hidden), dec_head(m.dec_head)
{
}

void ClickVaeGrads::zero()
{
    enc_hidden.zero();
    enc_head.zero();
    dec_hidden.zero();
    dec_head.zero();
}

std::vector<std::span<const double>> ClickVaeGrads::spans() const
{
    std::vector<std::span<const double>> out;
    nn::append_grads(out, enc_hidden);
    nn::append_grads(out, enc_head);
    nn::append_grads(out, dec_hidden);
    nn::append_grads(out, dec_head);
    return out;
}

BatchLoss cvae_batch_loss(const ClickVaeModel& model, const Tensor2& targets, const Tensor2& profiles,
                          const Tensor2* epsilon, const Tensor2* decoder_mask, double beta, ClickVaeGrads* grads)
{
    const std::size_t b = targets.rows(), L = model.latent();
    if (b == 0)
        throw ShapeError("cvae_batch_loss: empty batch");
    if (decoder_mask && (decoder_mask->rows() != b || decoder_mask->cols() != L))
        throw ShapeError("decoder dropout mask must be batch x latent");

    // Encoder input: binarise, then scale each row to unit norm.
    Tensor2 normalized = targets;
    for (std::size_t r = 0; r < b; ++r) {
        double n = 0.0;
        for (double& v : normalized.row(r)) {
            v = v > 0.0 ? 1.0 : 0.0;
            n += v;
        }
        if (n > 0.0)
            for (double& v : normalized.row(r))
                v /= std::sqrt(n);
    }
    const Pass p = run(model, normalized, profiles, epsilon, decoder_mask);

    BatchLoss out;
    const double nb = static_cast<double>(b);
    out.reconstruction = nn::multinomial_nll(targets, p.probs) / nb;
    out.kl = nn::gaussian_kl(p.params) / nb;
    out.loss = out.reconstruction + beta * out.kl;
    out.min_row_kl = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < b; ++r) {
        double kl = 0.0, sum = 0.0;
        for (std::size_t j = 0; j < L; ++j) {
            const double mu = p.params.mu(r, j), lv = p.params.log_var(r, j);
            kl += 0.5 * (mu * mu + std::exp(lv) - 1.0 - lv);
        }
        for (double v : p.probs.row(r))
            sum += v;
        out.min_row_kl = std::min(out.min_row_kl, kl);
        out.max_row_sum_error = std::max(out.max_row_sum_error, std::abs(sum - 1.0));
    }
    if (!grads)
        return out;

    Tensor2 dprobs = nn::multinomial_nll_grad(targets, p.probs);
    for (double& v : dprobs.values())
        v /= nb;
    Tensor2 ddec_h = nn::backward(model.dec_head, p.dec_h, p.probs, dprobs, grads->dec_head);
    Tensor2 ddec_in = nn::backward(model.dec_hidden, p.dec_in, p.dec_h, ddec_h, grads->dec_hidden);

    const nn::GaussianParams kl = nn::gaussian_kl_grad(p.params);
    Tensor2 denc_out(b, 2 * L);
    for (std::size_t r = 0; r < b; ++r)
        for (std::size_t j = 0; j < L; ++j) {
            double dz = ddec_in(r, j);
            if (decoder_mask)
                dz *= (*decoder_mask)(r, j);
            const double eps = epsilon ? (*epsilon)(r, j) : 0.0;
            const double sd = std::exp(0.5 * p.params.log_var(r, j));
            denc_out(r, j) = dz + beta * kl.mu(r, j) / nb;
            denc_out(r, L + j) = dz * eps * 0.5 * sd + beta * kl.log_var(r, j) / nb;
        }
    Tensor2 denc_h = nn::backward(model.enc_head, p.enc_h, p.enc_out, denc_out, grads->enc_head);
    nn::backward(model.enc_hidden, p.enc_in, p.enc_h, denc_h, grads->enc_hidden, false);
    return out;
}

std::uint64_t text_encoder_hash(const textenc::TextEncoderModel& model)
{
    textenc::TextEncoderModel copy = model;
    return nn::parameter_hash(copy.parameters());
}

VaeTrainReport train_click_vae(ClickVaeModel& model, const data::ClickMatrix& clicks,
                               const textenc::TextEncoderModel* text, const data::ItemEmbeddingTable& embeddings,
                               const VaeTrainConfig& config, Rng& rng)
{
    if (clicks.num_items() != model.items())
        throw ShapeError("click VAE has " + std::to_string(model.items()) + " items, data has " +
                         std::to_string(clicks.num_items()));
    if (config.beta < 0.0 || config.k < 1 || config.batch_size < 1)
        throw ConfigError("click VAE training needs beta >= 0, k >= 1 and batch size >= 1");
    if (model.conditioned()) {
        if (!text)
            throw ConfigError("a conditioned click VAE needs a trained text encoder");
        if (text->styles() != model.styles() || text->style_names != model.style_names)
            throw ConfigError("text encoder and click VAE style vocabularies differ");
        if (embeddings.size() != clicks.num_items())
            throw ShapeError("embeddings are not aligned to the click catalog");
    }

    VaeTrainReport report;
    report.min_kl = std::numeric_limits<double>::infinity();
    if (text)
        report.text_hash_before = text_encoder_hash(*text);

    auto params = model.parameters();
    nn::AdamOptimizer adam(config.adam);
    ClickVaeGrads grads(model);
    std::vector<double> last_good = nn::flatten(params);
    const std::size_t users = clicks.num_users();
    const std::size_t batches_per_epoch = (users + config.batch_size - 1) / config.batch_size;
    const std::size_t total_steps = batches_per_epoch * config.epochs;
    const std::size_t warmup_steps = config.beta_warmup ? std::max<std::size_t>(1, total_steps / 5) : 0;
    std::vector<std::size_t> order(users);
    std::iota(order.begin(), order.end(), 0);
    std::normal_distribution<double> normal;

    auto abort = [&](const std::string& msg) -> NumericError {
        nn::unflatten(last_good, params);
        return NumericError(msg + "; parameters restored to the last finite epoch");
    };

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        Tensor2 profiles(users, model.styles());
        if (model.conditioned()) {
            Tensor2 content(users, embeddings.dim());
            for (std::size_t u = 0; u < users; ++u) {
                const auto v = data::user_content_vector(clicks.items_of(u), embeddings, config.k, rng,
                                                         clicks.user_ids()[u]);
                std::copy(v.begin(), v.end(), content.row(u).begin());
            }
            profiles = textenc::encode_batch(*text, content);
        }
        std::shuffle(order.begin(), order.end(), rng);

        double total = 0.0;
        for (std::size_t start = 0; start < users; start += config.batch_size) {
            const std::size_t end = std::min(users, start + config.batch_size), b = end - start;
            std::vector<std::vector<std::size_t>> rows;
            Tensor2 cond(b, model.styles());
            for (std::size_t r = 0; r < b; ++r) {
                const auto items = clicks.items_of(order[start + r]);
                rows.emplace_back(items.begin(), items.end());
                std::copy_n(profiles.row(order[start + r]).begin(), model.styles(), cond.row(r).begin());
            }
            const Tensor2 targets = binary_clicks(rows, model.items());
            Tensor2 eps(b, model.latent());
            for (double& v : eps.values())
                v = normal(rng);
            const Tensor2 mask = nn::dropout_mask(b, model.latent(), model.shape.decoder_dropout, rng);

            double beta = config.beta;
            if (warmup_steps && report.steps < warmup_steps)
                beta *= static_cast<double>(report.steps + 1) / static_cast<double>(warmup_steps);

            grads.zero();
            const BatchLoss bl = cvae_batch_loss(model, targets, cond, &eps, &mask, beta, &grads);
            if (!std::isfinite(bl.loss))
                throw abort("click VAE loss became non-finite in epoch " + std::to_string(epoch + 1));
            if (bl.min_row_kl < 0.0)
                throw abort("negative KL at step " + std::to_string(report.steps + 1));
            if (bl.max_row_sum_error > 1e-6)
                throw abort("decoder rows do not sum to 1 at step " + std::to_string(report.steps + 1));
            report.min_kl = std::min(report.min_kl, bl.min_row_kl);
            report.max_row_sum_error = std::max(report.max_row_sum_error, bl.max_row_sum_error);
            try {
                adam.step(params, grads.spans());
            } catch (const NumericError& e) {
                throw abort(e.what());
            }
            total += bl.loss;
            ++report.steps;
        }
        report.curve.epoch_loss.push_back(total / static_cast<double>(batches_per_epoch));
        last_good = nn::flatten(params);
    }
    if (text)
        report.text_hash_after = text_encoder_hash(*text);
    log::info("click VAE: " + std::to_string(config.epochs) + " epochs, " + std::to_string(report.steps) +
              " steps, final loss " +
              std::to_string(report.curve.epoch_loss.empty() ? 0.0 : report.curve.epoch_loss.back()));
    return report;
}

} // namespace scr::vae
