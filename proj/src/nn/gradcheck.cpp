#include "scr/nn/gradcheck.hpp"

#include "scr/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace scr::nn {

GradCheckReport grad_check(const ScalarLoss& loss, std::span<const double> params,
                           std::span<const double> analytic, double tolerance, double step)
{
    if (params.size() != analytic.size())
        throw ShapeError("grad_check: parameter and gradient sizes differ");
    GradCheckReport report;
    report.tolerance = tolerance;
    std::vector<double> probe(params.begin(), params.end());
    for (std::size_t i = 0; i < probe.size(); ++i) {
        const double original = probe[i];
        probe[i] = original + step;
        const double up = loss(probe);
        probe[i] = original - step;
        const double down = loss(probe);
        probe[i] = original;

        const double numeric = (up - down) / (2.0 * step);
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-3});
        const double rel = std::abs(analytic[i] - numeric) / denom;
        if (!(rel <= report.max_relative_error)) {
            report.max_relative_error = std::isnan(rel) ? INFINITY : rel;
            report.worst_index = i;
        }
        ++report.checked;
    }
    report.passed = report.max_relative_error < tolerance;
    return report;
}

} // namespace scr::nn
