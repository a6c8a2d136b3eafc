#include "scr/nn/dropout.hpp"

#include "scr/core/errors.hpp"

#include <string>

namespace scr::nn {

namespace {
void check_rate(double rate)
{
    if (!(rate >= 0.0 && rate < 1.0))
        throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(rate));
}
} // namespace

Tensor2 dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng)
{
    check_rate(rate);
    Tensor2 mask(rows, cols, 1.0);
    if (rate == 0.0)
        return mask;
    const double keep_scale = 1.0 / (1.0 - rate);
    std::bernoulli_distribution drop(rate);
    for (double& m : mask.values())
        m = drop(rng) ? 0.0 : keep_scale;
    return mask;
}

void apply_mask(Tensor2& x, const Tensor2& mask)
{
    if (x.rows() != mask.rows() || x.cols() != mask.cols())
        throw ShapeError("dropout mask shape mismatch");
    auto xv = x.values();
    auto mv = mask.values();
    for (std::size_t i = 0; i < xv.size(); ++i)
        xv[i] *= mv[i];
}

Tensor2 dropout(const Tensor2& x, double rate, Rng& rng, bool training)
{
    check_rate(rate);
    if (!training)
        return x;
    Tensor2 out = x;
    apply_mask(out, dropout_mask(x.rows(), x.cols(), rate, rng));
    return out;
}

} // namespace scr::nn
