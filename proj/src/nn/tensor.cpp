#include "scr/nn/tensor.hpp"

#include "scr/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace scr::nn {

namespace {
std::string shape_str(const Tensor2& t)
{
    return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}
} // namespace

Tensor2::Tensor2(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill)
{
}

Tensor2::Tensor2(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values))
{
    if (values_.size() != rows * cols)
        throw ShapeError("tensor storage holds " + std::to_string(values_.size()) + " values, expected " +
                         std::to_string(rows * cols));
}

Tensor2::Tensor2(std::initializer_list<std::initializer_list<double>> rows)
{
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    values_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_)
            throw ShapeError("ragged tensor literal");
        values_.insert(values_.end(), r.begin(), r.end());
    }
}

void Tensor2::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Tensor2::all_finite() const noexcept
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Tensor2 matmul(const Tensor2& a, const Tensor2& b)
{
    if (a.cols() != b.rows())
        throw ShapeError("matmul " + shape_str(a) + " by " + shape_str(b));
    Tensor2 out(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* o = out.row(i).data();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0)
                continue;
            const double* br = b.row(k).data();
            for (std::size_t j = 0; j < n; ++j)
                o[j] += aik * br[j];
        }
    }
    return out;
}

void matmul_at_b_accumulate(const Tensor2& a, const Tensor2& b, Tensor2& out)
{
    if (a.rows() != b.rows() || out.rows() != a.cols() || out.cols() != b.cols())
        throw ShapeError("matmul_at_b " + shape_str(a) + "ᵀ by " + shape_str(b) + " into " + shape_str(out));
    const std::size_t n = b.cols();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double* br = b.row(r).data();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double ari = a(r, i);
            if (ari == 0.0)
                continue;
            double* o = out.row(i).data();
            for (std::size_t j = 0; j < n; ++j)
                o[j] += ari * br[j];
        }
    }
}

Tensor2 matmul_a_bt(const Tensor2& a, const Tensor2& b)
{
    if (a.cols() != b.cols())
        throw ShapeError("matmul_a_bt " + shape_str(a) + " by " + shape_str(b) + "ᵀ");
    Tensor2 out(a.rows(), b.rows());
    const std::size_t n = a.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ar = a.row(i).data();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* br = b.row(j).data();
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += ar[k] * br[k];
            out(i, j) = s;
        }
    }
    return out;
}

Tensor2 hconcat(const Tensor2& a, const Tensor2& b)
{
    if (a.rows() != b.rows())
        throw ShapeError("hconcat " + shape_str(a) + " with " + shape_str(b));
    Tensor2 out(a.rows(), a.cols() + b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto o = out.row(r);
        std::copy(a.row(r).begin(), a.row(r).end(), o.begin());
        std::copy(b.row(r).begin(), b.row(r).end(), o.begin() + static_cast<std::ptrdiff_t>(a.cols()));
    }
    return out;
}

Tensor2 column_slice(const Tensor2& t, std::size_t first, std::size_t count)
{
    if (first + count > t.cols())
        throw ShapeError("column slice past end of " + shape_str(t));
    Tensor2 out(t.rows(), count);
    for (std::size_t r = 0; r < t.rows(); ++r)
        for (std::size_t c = 0; c < count; ++c)
            out(r, c) = t(r, first + c);
    return out;
}

} // namespace scr::nn
