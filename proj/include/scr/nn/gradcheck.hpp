#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace scr::nn {

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::size_t worst_index = 0;
    std::size_t checked = 0;
    double tolerance = 0.0;
    bool passed = true;
};

using ScalarLoss = std::function<double(std::span<const double>)>;

/**
 * Compares `analytic` against central differences of `loss` at `params`.
 *
 * Relative error per coordinate is |a − n| / max(|a|, |n|, 1e-3); the floor
 * keeps coordinates whose true gradient is ~0 from dominating the report.
 */
GradCheckReport grad_check(const ScalarLoss& loss, std::span<const double> params,
                           std::span<const double> analytic, double tolerance, double step = 1e-4);

} // namespace scr::nn
