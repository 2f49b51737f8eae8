#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sgcl/errors.hpp"

namespace sgcl {

// Row-major dense matrix. T is float for training tensors, double for oracles
// and the 64-bit reproducibility mode.
template <typename T>
class DenseMatrix {
public:
    using value_type = T;

    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, T fill = T(0))
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        detail::require(values_.size() == rows_ * cols_, "DenseMatrix: value count does not match shape");
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    T& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const noexcept { return {values_.data() + r * cols_, cols_}; }

    std::span<T> values() noexcept { return values_; }
    std::span<const T> values() const noexcept { return values_; }

    void fill(T v) { std::fill(values_.begin(), values_.end(), v); }

    bool same_shape(const DenseMatrix& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](T v) { return std::isfinite(v); });
    }

    template <typename U>
    DenseMatrix<U> cast() const {
        std::vector<U> out(values_.begin(), values_.end());
        return DenseMatrix<U>(rows_, cols_, std::move(out));
    }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    DenseMatrix& operator+=(const DenseMatrix& o) {
        detail::require(same_shape(o), "DenseMatrix +=: shape mismatch");
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }

    DenseMatrix& operator*=(T s) {
        for (auto& v : values_) v *= s;
        return *this;
    }

    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> values_;
};

// C = A * B. Zero entries of A are skipped, which matters for bag-of-words
// features and masked inputs.
template <typename T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    detail::require(a.cols() == b.rows(), "matmul: inner dimension mismatch");
    DenseMatrix<T> c(a.rows(), b.cols());
    const std::size_t m = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T* ci = c.row(i).data();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T(0)) continue;
            const T* bk = b.row(k).data();
            for (std::size_t j = 0; j < m; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

// C = Aᵀ * B
template <typename T>
DenseMatrix<T> matmul_tn(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    detail::require(a.rows() == b.rows(), "matmul_tn: row count mismatch");
    DenseMatrix<T> c(a.cols(), b.cols());
    const std::size_t m = b.cols();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const T* br = b.row(r).data();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T ark = a(r, k);
            if (ark == T(0)) continue;
            T* ck = c.row(k).data();
            for (std::size_t j = 0; j < m; ++j) ck[j] += ark * br[j];
        }
    }
    return c;
}

// C = A * Bᵀ
template <typename T>
DenseMatrix<T> matmul_nt(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    detail::require(a.cols() == b.cols(), "matmul_nt: column count mismatch");
    DenseMatrix<T> c(a.rows(), b.rows());
    const std::size_t k = a.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const T* ai = a.row(i).data();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const T* bj = b.row(j).data();
            T acc = T(0);
            for (std::size_t t = 0; t < k; ++t) acc += ai[t] * bj[t];
            c(i, j) = acc;
        }
    }
    return c;
}

template <typename T>
T max_abs_diff(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    detail::require(a.same_shape(b), "max_abs_diff: shape mismatch");
    T m = T(0);
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

} // namespace sgcl
