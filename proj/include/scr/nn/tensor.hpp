#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace scr::nn {

/**
 * Dense row-major matrix of doubles.
 *
 * Every training quantity in the project (click rows, content vectors,
 * activations, weights) is carried in a Tensor2. Batches are rows.
 */
class Tensor2 {
public:
    Tensor2() = default;
    Tensor2(std::size_t rows, std::size_t cols, double fill = 0.0);
    Tensor2(std::size_t rows, std::size_t cols, std::vector<double> values);
    Tensor2(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {values_.data() + r * cols_, cols_}; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    void fill(double v);
    bool all_finite() const noexcept;

    friend bool operator==(const Tensor2&, const Tensor2&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// a·b. Zero entries of `a` are skipped, so sparse left operands are cheap.
Tensor2 matmul(const Tensor2& a, const Tensor2& b);

/// aᵀ·b, accumulated into `out` (which must be a.cols × b.cols).
void matmul_at_b_accumulate(const Tensor2& a, const Tensor2& b, Tensor2& out);

/// a·bᵀ.
Tensor2 matmul_a_bt(const Tensor2& a, const Tensor2& b);

/// Column-wise concatenation [a | b]; rows must agree.
Tensor2 hconcat(const Tensor2& a, const Tensor2& b);

/// Columns [first, first + count).
Tensor2 column_slice(const Tensor2& t, std::size_t first, std::size_t count);

} // namespace scr::nn
